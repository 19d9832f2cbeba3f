//! Class catalogs on disk and the tables derived from them.
//!
//! ```text
//! # n=<n> kind=<kind> total=<N> classes=<k>
//! <hex-rep> <aut> <atop> <perm-type> <class-size> <e:0|1> <i:0|1> <s:0|1>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::classifier::{ClassRecord, Kind};
use crate::error::{check_dim, Error, Result};
use crate::hypercube::{classify_set, CodeSet};
use crate::symmetry::{canonical_rep, frequency_cube_counts, group_order, GroupSummary, PermGroupType, MAX_CANON_DIM};

/// A complete list of classes of one family and length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogFile {
    pub n: usize,
    pub kind: Kind,
    pub records: Vec<ClassRecord>,
}

impl CatalogFile {
    pub fn new(n: usize, kind: Kind, mut records: Vec<ClassRecord>) -> Result<CatalogFile> {
        records.sort_by(|a, b| a.rep.cmp(&b.rep));
        let cat = CatalogFile { n, kind, records };
        cat.check_structure()?;
        Ok(cat)
    }

    pub fn total(&self) -> u128 {
        self.records.iter().map(|r| r.class_size as u128).sum()
    }

    fn check_structure(&self) -> Result<()> {
        check_dim(self.n, 1, MAX_CANON_DIM)?;
        for w in self.records.windows(2) {
            if w[0].rep >= w[1].rep {
                return Err(Error::Validation(format!("representatives not increasing at {}", w[1].rep)));
            }
        }
        for r in &self.records {
            if r.n != self.n || !self.kind.accepts(classify_set(&r.rep)) {
                return Err(Error::Validation(format!("{} is not a {} of length {}", r.rep, self.kind, self.n)));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# n={} kind={} total={} classes={}\n# generator=freqcube {}\n",
            self.n,
            self.kind,
            self.total(),
            self.records.len(),
            env!("CARGO_PKG_VERSION")
        );
        for r in &self.records {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {} {} {}",
                r.rep.to_hex(),
                r.group.aut_order,
                r.group.atop_order,
                r.group.perm_type,
                r.class_size,
                r.equiv_to_complement as u8,
                r.isotopic_to_complement as u8,
                r.splittable as u8
            );
        }
        out
    }

    /// Parses a catalog, recomputing totals and checking that every
    /// representative is a canonical fixed point with the recorded `|Aut|`.
    pub fn from_text(text: &str) -> Result<CatalogFile> {
        let cat = Self::parse(text)?;
        let lines: Vec<usize> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
            .map(|(i, _)| i + 1)
            .collect();
        let bad = cat.records.par_iter().zip(lines.par_iter()).find_map_first(|(r, &line)| {
            match canonical_rep(&r.rep) {
                Ok((rep, aut)) if rep == r.rep && aut == r.group.aut_order => None,
                Ok(_) => Some(Error::Validation(format!("line {line}: representative is not canonical"))),
                Err(e) => Some(Error::Parse { line, message: e.to_string() }),
            }
        });
        match bad {
            Some(e) => Err(e),
            None => Ok(cat),
        }
    }

    /// Parses without the canonical-form check.
    pub fn parse(text: &str) -> Result<CatalogFile> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or("");
        let bad = |line: usize, m: String| Error::Parse { line, message: m };
        let wrong = |line: usize, m: &str| Error::Validation(format!("line {line}: {m}"));
        let fields: Vec<(&str, &str)> = header
            .strip_prefix("# ")
            .ok_or_else(|| bad(1, "missing catalog header".into()))?
            .split_whitespace()
            .map(|f| f.split_once('=').ok_or_else(|| bad(1, format!("bad header field {f:?}"))))
            .collect::<Result<_>>()?;
        let get = |k: &str| {
            fields.iter().find(|(key, _)| *key == k).map(|(_, v)| *v).ok_or_else(|| bad(1, format!("header lacks {k}")))
        };
        let n: usize = get("n")?.parse().map_err(|_| bad(1, "bad n".into()))?;
        check_dim(n, 1, MAX_CANON_DIM).map_err(|e| bad(1, e.to_string()))?;
        let kind: Kind = get("kind")?.parse().map_err(|e: Error| bad(1, e.to_string()))?;
        let total: u128 = get("total")?.parse().map_err(|_| bad(1, "bad total".into()))?;
        let classes: usize = get("classes")?.parse().map_err(|_| bad(1, "bad class count".into()))?;

        let mut records = Vec::new();
        for (i, line) in lines {
            let no = i + 1;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 8 {
                return Err(bad(no, format!("expected 8 fields, found {}", f.len())));
            }
            let rep = CodeSet::from_hex(n, f[0]).map_err(|e| bad(no, e.to_string()))?;
            let num = |s: &str, what: &str| s.parse::<u64>().map_err(|_| bad(no, format!("bad {what}")));
            let flag = |s: &str, what: &str| match s {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(bad(no, format!("bad {what} flag"))),
            };
            let aut = num(f[1], "aut")?;
            let atop = num(f[2], "atop")?;
            let perm_type: PermGroupType = f[3].parse().map_err(|e: Error| bad(no, e.to_string()))?;
            let class_size = num(f[4], "class size")?;
            if aut == 0 || atop == 0 || aut % atop != 0 || aut / atop != perm_type.order() {
                return Err(wrong(no, "group orders do not satisfy |Aut| = P·|Atop|"));
            }
            if !group_order(n).is_multiple_of(aut as u128) || (group_order(n) / aut as u128) != class_size as u128 {
                return Err(wrong(no, "class size is not 24^n·n!/|Aut|"));
            }
            let rec = ClassRecord {
                n,
                rep,
                group: GroupSummary { aut_order: aut, atop_order: atop, perm_order: aut / atop, perm_type },
                class_size,
                equiv_to_complement: flag(f[5], "complement-equivalence")?,
                isotopic_to_complement: flag(f[6], "complement-isotopy")?,
                splittable: flag(f[7], "splittable")?,
            };
            if let Some(prev) = records.last() {
                let prev: &ClassRecord = prev;
                if prev.rep >= rec.rep {
                    return Err(bad(no, "representatives must be strictly increasing".into()));
                }
            }
            if !kind.accepts(classify_set(&rec.rep)) {
                return Err(wrong(no, &format!("representative is not a {kind}")));
            }
            records.push(rec);
        }
        if records.is_empty() {
            return Err(bad(1, "catalog has no records".into()));
        }
        let cat = CatalogFile { n, kind, records };
        if cat.records.len() != classes || cat.total() != total {
            return Err(wrong(
                1,
                &format!(
                    "header says {classes} classes / total {total}, records give {} / {}",
                    cat.records.len(),
                    cat.total()
                ),
            ));
        }
        Ok(cat)
    }
}

pub fn write_catalog(path: &Path, cat: &CatalogFile) -> Result<()> {
    std::fs::write(path, cat.to_text())?;
    Ok(())
}

pub fn read_catalog(path: &Path) -> Result<CatalogFile> {
    CatalogFile::from_text(&std::fs::read_to_string(path)?)
}

/// Class counts by set size, paired with the complementary size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeTable {
    pub n: usize,
    /// `(size, classes of that size, of which double-codes)` for
    /// `size <= 4^n/2`.
    pub rows: Vec<(usize, usize, usize)>,
    pub total_classes: usize,
    /// Classes that are double-codes or complements of double-codes.
    pub total_double_codes: usize,
}

/// Size table of a unitrade catalog.
pub fn size_table(records: &[ClassRecord]) -> Result<SizeTable> {
    let n = records.first().map(|r| r.n).ok_or_else(|| Error::Precondition("empty catalog".into()))?;
    let half = crate::hypercube::cells(n) / 2;
    let mut rows = Vec::new();
    for size in 0..=half {
        let of_size: Vec<&ClassRecord> = records.iter().filter(|r| r.rep.len() == size).collect();
        if of_size.is_empty() {
            continue;
        }
        let dc = of_size.iter().filter(|r| classify_set(&r.rep).is_double_code).count();
        rows.push((size, of_size.len(), dc));
    }
    let total_double_codes = records
        .iter()
        .filter(|r| classify_set(&r.rep).is_double_code || classify_set(&r.rep.complement()).is_double_code)
        .count();
    Ok(SizeTable { n, rows, total_classes: records.len(), total_double_codes })
}

fn render_size_table(t: &SizeTable) -> String {
    let full = crate::hypercube::cells(t.n);
    let mut out = format!("Unitrades in H({},4): equivalence classes by size\n", t.n);
    let _ = writeln!(out, "{:<12} {:>10} {:>13}", "size", "unitrades", "double-codes");
    for &(size, u, d) in &t.rows {
        let label = if 2 * size == full { size.to_string() } else { format!("{size} or {}", full - size) };
        let _ = writeln!(out, "{label:<12} {u:>10} {d:>13}");
    }
    let _ = writeln!(out, "{:<12} {:>10} {:>13}", "total:", t.total_classes, t.total_double_codes);
    out
}

fn render_aut_table(records: &[ClassRecord]) -> Result<String> {
    let rep = frequency_cube_counts(records)?;
    let n = rep.n;
    let label = |p: &PermGroupType| if n <= 3 { p.plain_label() } else { p.to_string() };
    let mut out = format!("Double-MDS-codes in H({n},4) by automorphism group P·T\n");
    let _ = writeln!(out, "{:<12} {:>6} {:>6} {:>6} {:>6}", "|Aut(C)|", "N", "N'", "N''", "N*");
    for r in &rep.rows {
        let star = if r.splittable == 0 { String::new() } else { r.splittable.to_string() };
        let _ = writeln!(
            out,
            "{:<12} {:>6} {:>6} {:>6} {:>6}",
            format!("{}·{}", label(&r.perm_type), r.atop),
            r.classes,
            r.equiv_complement,
            r.isotopic_complement,
            star
        );
    }
    let _ = writeln!(
        out,
        "{:<12} {:>6} {:>6} {:>6} {:>6}",
        "total:", rep.total_classes, rep.total_equiv_complement, rep.total_isotopic_complement, rep.total_splittable
    );
    out.push('\n');
    let _ = writeln!(out, "Derived counts per row");
    let _ = writeln!(
        out,
        "{:<12} {:>10} {:>8} {:>8} {:>8} {:>10} {:>8} {:>8}",
        "|Aut(C)|", "iso-codes", "cubes", "PT-aut", "2PT-aut", "iso-cubes", "T-atop", "2T-atop"
    );
    for r in &rep.rows {
        let _ = writeln!(
            out,
            "{:<12} {:>10} {:>8} {:>8} {:>8} {:>10} {:>8} {:>8}",
            format!("{}·{}", label(&r.perm_type), r.atop),
            r.code_isotopy_classes,
            r.cube_classes,
            r.cube_classes_plain_aut,
            r.equiv_complement,
            r.cube_isotopy_classes,
            r.cube_isotopy_plain_atop,
            r.cube_isotopy_double_atop
        );
    }
    let _ = writeln!(out, "codes: {}", rep.total_codes);
    let _ = writeln!(out, "equivalence classes of codes: {}", rep.total_classes);
    let _ = writeln!(out, "isotopy classes of codes: {}", rep.code_isotopy_classes);
    let _ = writeln!(out, "equivalence classes of frequency cubes: {}", rep.cube_classes);
    let _ = writeln!(out, "isotopy classes of frequency cubes: {}", rep.cube_isotopy_classes);
    Ok(out)
}

/// Text tables for each catalog: the size table for unitrades and the
/// automorphism table with frequency-cube counts for double-MDS-codes.
pub fn render_tables(catalogs: &[CatalogFile]) -> Result<String> {
    let mut cats: Vec<&CatalogFile> = catalogs.iter().collect();
    cats.sort_by_key(|c| (c.kind, c.n));
    let mut out = String::new();
    for c in cats {
        if !out.is_empty() {
            out.push('\n');
        }
        match c.kind {
            Kind::DoubleMds => out.push_str(&render_aut_table(&c.records)?),
            Kind::Unitrade => out.push_str(&render_size_table(&size_table(&c.records)?)),
            Kind::DoubleCode => {
                let _ = writeln!(out, "Double-codes in H({},4): {} classes, {} sets", c.n, c.records.len(), c.total());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::classify;

    #[test]
    fn round_trip_n2() {
        let c = classify(2, Kind::DoubleMds).unwrap();
        let cat = CatalogFile::new(2, Kind::DoubleMds, c.classes).unwrap();
        let text = cat.to_text();
        assert!(text.starts_with(&format!("# n=2 kind=dmds total=90 classes={}\n", cat.records.len())));
        assert_eq!(CatalogFile::from_text(&text).unwrap(), cat);
        assert_eq!(CatalogFile::from_text(&text).unwrap().to_text(), text);
    }

    #[test]
    fn rejects_bad_files() {
        let c = classify(2, Kind::DoubleMds).unwrap();
        let text = CatalogFile::new(2, Kind::DoubleMds, c.classes).unwrap().to_text();
        assert!(CatalogFile::from_text("").is_err());
        assert!(CatalogFile::from_text("# n=0 kind=dmds total=0 classes=0\n").is_err());
        let wrong_total = text.replacen("total=90", "total=91", 1);
        assert!(matches!(CatalogFile::from_text(&wrong_total), Err(Error::Validation(_))));
        // A non-canonical representative of the same class: its transpose
        // or a relabeling; swap the symbols of the first coordinate.
        let rec_line = text.lines().nth(2).unwrap();
        let hex = rec_line.split_whitespace().next().unwrap();
        let rep = CodeSet::from_hex(2, hex).unwrap();
        let moved = crate::symmetry::Transform::isotopy(&[[3, 2, 1, 0], [0, 1, 2, 3]]).unwrap().apply(&rep).unwrap();
        assert_ne!(moved, rep);
        let tampered = text.replacen(hex, &moved.to_hex(), 1);
        assert!(CatalogFile::from_text(&tampered).is_err());
        let garbage = text.replacen(hex, "zz", 1);
        assert!(matches!(CatalogFile::from_text(&garbage), Err(Error::Parse { line: 3, .. })));
    }
}
