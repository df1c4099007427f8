//! Standoff `.ann` parsing, serialization, and paired-file corpus loading.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;

use super::{
    Corpus, CorpusError, Document, Entity, EntityType, Relation, RelationType, Span, Warning,
};

/// Result of parsing one `.ann` file.
#[derive(Debug, Default)]
pub struct AnnParse {
    pub entities: Vec<Entity>,
    pub relations: Vec<Relation>,
    pub warnings: Vec<Warning>,
}

fn perr(line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses line-oriented standoff annotations against their companion note
/// text.
///
/// `T` lines become entities (semicolon-separated fragment lists supported)
/// and `R` lines become relations; any other line kind (`A`, `N`, `#`, ...)
/// is skipped with a warning. Relation arguments are accepted in either
/// order and normalized so that the attribute is the non-drug entity.
///
/// In strict mode a surface string that does not match the document text is
/// an error; in lenient mode it is downgraded to a warning and the file's
/// surface is kept. Lenient mode also skips (with a warning) entities whose
/// type string is unknown, and any relation referencing them. Structural
/// problems — malformed lines, out-of-bounds spans, dangling arguments —
/// are errors in both modes.
pub fn parse_ann(ann_text: &str, doc_text: &str, strict: bool) -> Result<AnnParse, CorpusError> {
    let chars: Vec<char> = doc_text.chars().collect();
    let mut out = AnnParse::default();
    let mut entity_ids: IndexMap<String, EntityType> = IndexMap::new();
    let mut skipped_entities: Vec<String> = Vec::new();

    // First pass: entities.
    for (lineno, raw) in ann_text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || !line.starts_with('T') {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let id = fields.next().unwrap_or_default();
        let (head, surface) = match (fields.next(), fields.next()) {
            (Some(h), Some(s)) => (h, s),
            _ => return Err(perr(lineno, "entity line needs 3 tab-separated fields")),
        };
        let (type_str, span_str) = head
            .split_once(' ')
            .ok_or_else(|| perr(lineno, "entity line missing span list"))?;
        let etype: EntityType = match type_str.parse() {
            Ok(t) => t,
            Err(msg) if strict => return Err(perr(lineno, msg)),
            Err(msg) => {
                out.warnings
                    .push(Warning::new(Some(lineno), format!("{msg}; entity skipped")));
                skipped_entities.push(id.to_string());
                continue;
            }
        };
        let mut fragments = Vec::new();
        for frag in span_str.split(';') {
            let mut nums = frag.split_whitespace();
            let (s, e) = match (nums.next(), nums.next(), nums.next()) {
                (Some(s), Some(e), None) => (s, e),
                _ => return Err(perr(lineno, format!("bad span fragment {frag:?}"))),
            };
            let start: usize = s
                .parse()
                .map_err(|_| perr(lineno, format!("bad span offset {s:?}")))?;
            let end: usize = e
                .parse()
                .map_err(|_| perr(lineno, format!("bad span offset {e:?}")))?;
            let span = Span::new(start, end)
                .map_err(|e| perr(lineno, e.to_string()))?;
            if span.end > chars.len() {
                return Err(CorpusError::SpanOutOfBounds {
                    id: id.to_string(),
                    start: span.start,
                    end: span.end,
                    len: chars.len(),
                });
            }
            fragments.push(span);
        }
        // Normalize fragment order; brat exports do not guarantee it.
        fragments.sort();
        let expected: String = fragments
            .iter()
            .map(|f| chars[f.start..f.end].iter().collect::<String>())
            .collect::<Vec<_>>()
            .join(" ");
        if expected != surface {
            if strict {
                return Err(CorpusError::SurfaceMismatch {
                    id: id.to_string(),
                    surface: surface.to_string(),
                    expected,
                });
            }
            out.warnings.push(Warning::new(
                Some(lineno),
                format!("entity {id}: surface {surface:?} does not match text {expected:?}"),
            ));
        }
        let entity = Entity::new(id, etype, fragments, surface)?;
        if entity_ids.insert(entity.id.clone(), etype).is_some() {
            return Err(CorpusError::DuplicateId { id: entity.id });
        }
        out.entities.push(entity);
    }

    // Second pass: relations and everything else.
    let mut relation_ids: IndexMap<String, ()> = IndexMap::new();
    for (lineno, raw) in ann_text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('T') {
            continue;
        }
        if !line.starts_with('R') {
            let kind = line.chars().next().unwrap();
            out.warnings.push(Warning::new(
                Some(lineno),
                format!("ignoring unsupported annotation kind {kind:?}"),
            ));
            continue;
        }
        match parse_r_line(line, lineno, strict, |tid| entity_ids.get(tid).copied())? {
            RLine::Relation(rel) => {
                if relation_ids.insert(rel.id.clone(), ()).is_some() {
                    return Err(CorpusError::DuplicateId { id: rel.id });
                }
                out.relations.push(rel);
            }
            RLine::Skip(warning) => {
                // Only reachable in lenient mode for arguments pointing at
                // entities that were themselves skipped above.
                let (id, arg) = warning;
                if skipped_entities.iter().any(|s| s == &arg) {
                    out.warnings.push(Warning::new(
                        Some(lineno),
                        format!("relation {id} references skipped entity {arg}; relation skipped"),
                    ));
                } else {
                    return Err(CorpusError::DanglingArgument { id, arg });
                }
            }
        }
    }
    Ok(out)
}

enum RLine {
    Relation(Relation),
    Skip((String, String)),
}

fn parse_r_line(
    line: &str,
    lineno: usize,
    strict: bool,
    lookup: impl Fn(&str) -> Option<EntityType>,
) -> Result<RLine, CorpusError> {
    let (id, body) = line
        .split_once('\t')
        .ok_or_else(|| perr(lineno, "relation line needs 2 tab-separated fields"))?;
    let parts: Vec<&str> = body.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(perr(
            lineno,
            "relation line needs a type and two Arg fields",
        ));
    }
    let rtype: RelationType = parts[0]
        .parse()
        .map_err(|msg: String| perr(lineno, msg))?;
    let mut arg1 = None;
    let mut arg2 = None;
    for part in &parts[1..] {
        let (role, tid) = part
            .split_once(':')
            .ok_or_else(|| perr(lineno, format!("bad argument field {part:?}")))?;
        match role {
            "Arg1" => arg1 = Some(tid),
            "Arg2" => arg2 = Some(tid),
            _ => return Err(perr(lineno, format!("unknown argument role {role:?}"))),
        }
    }
    let (a1, a2) = match (arg1, arg2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(perr(lineno, "relation line needs both Arg1 and Arg2")),
    };
    let t1 = match lookup(a1) {
        Some(t) => t,
        None if !strict => return Ok(RLine::Skip((id.to_string(), a1.to_string()))),
        None => {
            return Err(CorpusError::DanglingArgument {
                id: id.to_string(),
                arg: a1.to_string(),
            })
        }
    };
    let t2 = match lookup(a2) {
        Some(t) => t,
        None if !strict => return Ok(RLine::Skip((id.to_string(), a2.to_string()))),
        None => {
            return Err(CorpusError::DanglingArgument {
                id: id.to_string(),
                arg: a2.to_string(),
            })
        }
    };
    // Normalize argument order by entity type: the attribute side is the
    // non-drug entity.
    let attr_type = rtype.attribute_type();
    let (attr, drug) = if t2 == EntityType::Drug && t1 == attr_type {
        (a1, a2)
    } else if t1 == EntityType::Drug && t2 == attr_type {
        (a2, a1)
    } else {
        return Err(CorpusError::BadRelation {
            id: id.to_string(),
            message: format!("arguments of types {t1}/{t2} do not fit {rtype}"),
        });
    };
    Ok(RLine::Relation(Relation::new(id, rtype, attr, drug)))
}

/// Parses a predictions-only `.ann` (R lines referencing the gold entities of
/// `doc`). Entity (`T`) lines are ignored with a warning; an argument id not
/// present in `doc` is an error.
pub fn parse_pred_ann(
    ann_text: &str,
    doc: &Document,
) -> Result<(Vec<Relation>, Vec<Warning>), CorpusError> {
    let mut relations = Vec::new();
    let mut warnings = Vec::new();
    for (lineno, raw) in ann_text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        if !line.starts_with('R') {
            warnings.push(Warning::new(
                Some(lineno),
                "non-relation line ignored in prediction file",
            ));
            continue;
        }
        match parse_r_line(line, lineno, true, |tid| doc.entity(tid).map(|e| e.etype))? {
            RLine::Relation(rel) => relations.push(rel),
            RLine::Skip(_) => unreachable!("strict parse never skips"),
        }
    }
    Ok((relations, warnings))
}

/// Serializes entities then relations back to the standoff format, one line
/// per annotation, each terminated by a newline. Empty input yields "".
pub fn serialize_ann<'a>(
    entities: impl IntoIterator<Item = &'a Entity>,
    relations: impl IntoIterator<Item = &'a Relation>,
) -> String {
    let mut out = String::new();
    for e in entities {
        let spans = e
            .fragments
            .iter()
            .map(|f| format!("{} {}", f.start, f.end))
            .collect::<Vec<_>>()
            .join(";");
        writeln!(out, "{}\t{} {}\t{}", e.id, e.etype, spans, e.surface).unwrap();
    }
    for r in relations {
        writeln!(out, "{}\t{} Arg1:{} Arg2:{}", r.id, r.rtype, r.attr, r.drug).unwrap();
    }
    out
}

/// Loads every `<id>.txt`/`<id>.ann` pair under `dir` into a [`Corpus`]
/// sorted by doc id. A `.txt` without a companion `.ann` loads with zero
/// annotations and a warning; a `.ann` without its `.txt` is an error.
/// Files with other extensions are ignored.
pub fn load_corpus(dir: &Path, strict: bool) -> Result<(Corpus, Vec<Warning>), CorpusError> {
    let mut stems: BTreeMap<String, (bool, bool)> = BTreeMap::new();
    let rd = fs::read_dir(dir).map_err(|e| CorpusError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    for entry in rd {
        let entry = entry.map_err(|e| CorpusError::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        let (Some(stem), Some(ext)) = (
            path.file_stem().and_then(|s| s.to_str()),
            path.extension().and_then(|s| s.to_str()),
        ) else {
            continue;
        };
        let slot = stems.entry(stem.to_string()).or_insert((false, false));
        match ext {
            "txt" => slot.0 = true,
            "ann" => slot.1 = true,
            _ => {}
        }
    }

    let mut documents = Vec::new();
    let mut warnings = Vec::new();
    for (stem, (has_txt, has_ann)) in stems {
        if !has_txt && !has_ann {
            continue;
        }
        if !has_txt {
            return Err(CorpusError::OrphanAnn {
                path: dir.join(format!("{stem}.ann")),
            });
        }
        let txt_path = dir.join(format!("{stem}.txt"));
        let text = fs::read_to_string(&txt_path).map_err(|e| CorpusError::Io {
            path: txt_path.clone(),
            source: e,
        })?;
        let parsed = if has_ann {
            let ann_path = dir.join(format!("{stem}.ann"));
            let ann_text = fs::read_to_string(&ann_path).map_err(|e| CorpusError::Io {
                path: ann_path.clone(),
                source: e,
            })?;
            parse_ann(&ann_text, &text, strict)?
        } else {
            warnings.push(Warning::new(
                None,
                format!("{stem}.txt has no companion .ann; loaded without annotations"),
            ));
            AnnParse::default()
        };
        for w in parsed.warnings {
            let loc = match w.line {
                Some(n) => format!("{stem}.ann line {n}"),
                None => format!("{stem}.ann"),
            };
            warnings.push(Warning::new(None, format!("{loc}: {}", w.message)));
        }
        documents.push(Document::new(stem, text, parsed.entities, parsed.relations)?);
    }
    Ok((Corpus::new(documents), warnings))
}
