//! Descriptors of the seventeen benchmark datasets, used as metadata: the
//! harness never downloads anything, it only knows what to expect from a file
//! the user provides.

use std::path::{Path, PathBuf};

use oexnrule::data::LabelColumn;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    /// Single-letter column id used in the published tables.
    pub letter: char,
    pub name: &'static str,
    pub n_features: usize,
    pub n_rows: usize,
    /// Class sizes as published, `(+, -)`.
    pub class_counts: (usize, usize),
    /// OpenML dataset id, when the dataset comes from OpenML.
    pub openml_id: Option<u32>,
    /// File name expected in the data directory.
    pub file: &'static str,
    /// Label column of the OpenML CSV export.
    pub label_column: &'static str,
    pub positive_label: &'static str,
}

impl CatalogEntry {
    pub fn label(&self) -> LabelColumn {
        self.label_column.parse().expect("infallible")
    }

    pub fn path_in(&self, dir: &Path) -> PathBuf {
        dir.join(self.file)
    }

    /// Whether the published class sizes add up to the published row count.
    /// They do not for ILPD (167 + 415 = 582 of 583 rows).
    pub fn counts_consistent(&self) -> bool {
        self.class_counts.0 + self.class_counts.1 == self.n_rows
    }

    /// Whether observed class counts match the published ones, in either
    /// order.
    pub fn counts_match(&self, counts: [usize; 2]) -> bool {
        let (a, b) = self.class_counts;
        (counts[0], counts[1]) == (a, b) || (counts[1], counts[0]) == (a, b)
    }
}

#[allow(clippy::too_many_arguments)]
const fn entry(
    letter: char,
    name: &'static str,
    n_features: usize,
    n_rows: usize,
    class_counts: (usize, usize),
    openml_id: Option<u32>,
    file: &'static str,
    label_column: &'static str,
    positive_label: &'static str,
) -> CatalogEntry {
    CatalogEntry {
        letter,
        name,
        n_features,
        n_rows,
        class_counts,
        openml_id,
        file,
        label_column,
        positive_label,
    }
}

pub const CATALOG: [CatalogEntry; 17] = [
    entry('A', "ILPD", 10, 583, (167, 415), Some(1480), "ilpd.csv", "Class", "2"),
    entry('B', "Heart", 13, 303, (99, 204), None, "heart.csv", "target", "1"),
    entry('C', "EMon", 9, 130, (64, 66), Some(944), "emon.csv", "binaryClass", "P"),
    entry('D', "AR5", 29, 36, (8, 28), Some(1062), "ar5.csv", "defects", "true"),
    entry(
        'E',
        "Cleve",
        13,
        303,
        (138, 165),
        Some(40710),
        "cleve.csv",
        "Class",
        "1",
    ),
    entry(
        'F',
        "BTum",
        9,
        286,
        (120, 166),
        Some(844),
        "btum.csv",
        "binaryClass",
        "P",
    ),
    entry(
        'G',
        "Wisc",
        32,
        194,
        (90, 104),
        Some(753),
        "wisc.csv",
        "binaryClass",
        "P",
    ),
    entry('H', "MC2", 39, 161, (52, 109), Some(1054), "mc2.csv", "c", "TRUE"),
    entry('I', "PRel", 12, 182, (52, 130), Some(1490), "prel.csv", "Class", "2"),
    entry('J', "Sonar", 60, 208, (97, 111), Some(40), "sonar.csv", "Class", "Rock"),
    entry(
        'K',
        "Sleep",
        7,
        62,
        (29, 33),
        Some(739),
        "sleep.csv",
        "binaryClass",
        "P",
    ),
    entry('L', "TSVM", 80, 156, (102, 54), Some(41976), "tsvm.csv", "Class", "1"),
    entry('M', "JEdit", 8, 369, (204, 165), Some(1048), "jedit.csv", "bug", "1"),
    entry(
        'N',
        "GDam",
        8,
        155,
        (49, 106),
        Some(1026),
        "gdam.csv",
        "binaryClass",
        "P",
    ),
    entry(
        'O',
        "CVine",
        8,
        52,
        (24, 28),
        Some(815),
        "cvine.csv",
        "binaryClass",
        "P",
    ),
    entry(
        'P',
        "PLRL",
        13,
        315,
        (182, 133),
        Some(915),
        "plrl.csv",
        "binaryClass",
        "P",
    ),
    entry('Q', "KC1B", 86, 145, (60, 85), Some(1066), "kc1b.csv", "Defective", "Y"),
];

/// Looks up by letter or by name, ignoring case.
pub fn lookup(key: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| {
        e.name.eq_ignore_ascii_case(key)
            || (key.len() == 1 && key.chars().next().is_some_and(|c| c.eq_ignore_ascii_case(&e.letter)))
    })
}

/// Directory holding the benchmark CSV files: `$OEXNRULE_DATA_DIR`, else
/// `data/` at the workspace root.
pub fn data_dir() -> PathBuf {
    match std::env::var_os("OEXNRULE_DATA_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR"))
            .ancestors()
            .nth(2)
            .unwrap_or_else(|| Path::new("."))
            .join("data"),
    }
}
