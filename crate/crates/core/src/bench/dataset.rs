//! Multi-source datasets and their CSV form.
//!
//! One row per (sample, source):
//!
//! ```text
//! sample_id,true_class,source_id,label,score_<class1>,...,score_<classN>
//! ```

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use indexmap::IndexMap;

use crate::error::{FusionError, Result};
use crate::frame::{validate_scores, Frame, SourceOutput};

pub const DEFAULT_TRUTH_COLUMN: &str = "true_class";
const SCORE_PREFIX: &str = "score_";

/// One source's report on one sample: its decided class and its scores.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceReport {
    pub label: usize,
    pub scores: Vec<f64>,
}

impl SourceReport {
    pub fn symbolic(&self) -> SourceOutput {
        SourceOutput::Symbolic(self.label)
    }

    pub fn numeric(&self) -> SourceOutput {
        SourceOutput::Numeric(self.scores.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub truth: usize,
    /// Indexed like [`Dataset::source_ids`].
    pub reports: Vec<SourceReport>,
}

impl Sample {
    pub fn labels(&self) -> Vec<usize> {
        self.reports.iter().map(|r| r.label).collect()
    }

    /// All sources' scores, concatenated in source order.
    pub fn feature_vector(&self) -> Vec<f64> {
        self.reports
            .iter()
            .flat_map(|r| r.scores.iter().copied())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    frame: Frame,
    source_ids: Vec<String>,
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(frame: Frame, source_ids: Vec<String>, samples: Vec<Sample>) -> Result<Self> {
        if source_ids.is_empty() {
            return Err(FusionError::Empty("source list"));
        }
        let n = frame.len();
        for sample in &samples {
            frame.check_class(sample.truth)?;
            if sample.reports.len() != source_ids.len() {
                return Err(FusionError::DimensionMismatch {
                    expected: source_ids.len(),
                    found: sample.reports.len(),
                });
            }
            for report in &sample.reports {
                frame.check_class(report.label)?;
                validate_scores(&report.scores, n)?;
            }
        }
        Ok(Self {
            frame,
            source_ids,
            samples,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn source_ids(&self) -> &[String] {
        &self.source_ids
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "sample_id".to_string(),
            DEFAULT_TRUTH_COLUMN.to_string(),
            "source_id".to_string(),
            "label".to_string(),
        ];
        header.extend(
            self.frame
                .labels()
                .iter()
                .map(|l| format!("{SCORE_PREFIX}{l}")),
        );
        w.write_record(&header).map_err(csv_io)?;
        let labels = self.frame.labels();
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        for sample in &self.samples {
            for (source, report) in self.source_ids.iter().zip(&sample.reports) {
                row.clear();
                row.push(sample.id.clone());
                row.push(labels[sample.truth].clone());
                row.push(source.clone());
                row.push(labels[report.label].clone());
                row.extend(report.scores.iter().map(|s| format_score(*s)));
                w.write_record(&row).map_err(csv_io)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<R: Read>(input: R, origin: &Path, truth_column: &str) -> Result<Self> {
        CsvLoader::new(origin, truth_column).load(input)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::load_with_truth(path, DEFAULT_TRUTH_COLUMN)
    }

    pub fn load_with_truth(path: impl AsRef<Path>, truth_column: &str) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file), path, truth_column)
    }
}

/// Fixed nine fractional digits.
pub fn format_score(score: f64) -> String {
    format!("{score:.9}")
}

/// Rounds onto the nine-digit grid used by the CSV format.
pub fn quantize_score(score: f64) -> f64 {
    (score * 1e9).round() / 1e9
}

fn csv_io(e: csv::Error) -> FusionError {
    FusionError::Io(std::io::Error::other(e))
}

struct CsvLoader<'a> {
    origin: PathBuf,
    truth_column: &'a str,
}

struct Columns {
    sample: usize,
    truth: usize,
    source: usize,
    label: usize,
    scores: Vec<usize>,
}

impl<'a> CsvLoader<'a> {
    fn new(origin: &Path, truth_column: &'a str) -> Self {
        Self {
            origin: origin.to_path_buf(),
            truth_column,
        }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> FusionError {
        FusionError::Parse {
            path: self.origin.clone(),
            line,
            message: message.into(),
        }
    }

    fn load<R: Read>(&self, input: R) -> Result<Dataset> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(input);
        let mut records = reader.records();
        let header = match records.next() {
            None => return Err(self.err(1, "empty file: header row required")),
            Some(r) => r.map_err(|e| self.err(1, e.to_string()))?,
        };
        let (frame, cols) = self.parse_header(&header)?;

        let mut source_ids: IndexMap<String, ()> = IndexMap::new();
        // sample id -> (truth, line, reports by source position)
        let mut samples: IndexMap<String, (usize, usize, Vec<Option<SourceReport>>)> =
            IndexMap::new();
        for record in records {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                self.err(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.len() != header.len() {
                return Err(self.err(
                    line,
                    format!("expected {} fields, found {}", header.len(), record.len()),
                ));
            }
            let class = |col: usize, what: &str| -> Result<usize> {
                let name = &record[col];
                frame
                    .index_of(name)
                    .ok_or_else(|| self.err(line, format!("unknown class `{name}` in {what}")))
            };
            let truth = class(cols.truth, self.truth_column)?;
            let label = class(cols.label, "label")?;
            let mut scores = Vec::with_capacity(cols.scores.len());
            for (k, &col) in cols.scores.iter().enumerate() {
                let text = record[col].trim();
                let value: f64 = text.parse().map_err(|_| {
                    self.err(
                        line,
                        format!(
                            "score `{text}` for class `{}` is not a number",
                            frame.labels()[k]
                        ),
                    )
                })?;
                if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                    return Err(self.err(
                        line,
                        format!(
                            "score {text} for class `{}` outside [0, 1]",
                            frame.labels()[k]
                        ),
                    ));
                }
                scores.push(value);
            }
            let source = &record[cols.source];
            if source.is_empty() {
                return Err(self.err(line, "empty source_id"));
            }
            let (source_pos, _) = source_ids.insert_full(source.to_string(), ());
            let sample_id = record[cols.sample].to_string();
            if sample_id.is_empty() {
                return Err(self.err(line, "empty sample_id"));
            }
            let entry = samples
                .entry(sample_id.clone())
                .or_insert((truth, line, Vec::new()));
            if entry.0 != truth {
                return Err(self.err(
                    line,
                    format!("sample `{sample_id}` has inconsistent true classes"),
                ));
            }
            if entry.2.len() <= source_pos {
                entry.2.resize(source_pos + 1, None);
            }
            if entry.2[source_pos].is_some() {
                return Err(self.err(
                    line,
                    format!("duplicate row for sample `{sample_id}` and source `{source}`"),
                ));
            }
            entry.2[source_pos] = Some(SourceReport { label, scores });
        }
        if samples.is_empty() {
            return Err(self.err(2, "no data rows"));
        }
        let m = source_ids.len();
        let samples = samples
            .into_iter()
            .map(|(id, (truth, line, mut reports))| {
                reports.resize(m, None);
                let reports = reports
                    .into_iter()
                    .enumerate()
                    .map(|(j, r)| {
                        r.ok_or_else(|| {
                            self.err(
                                line,
                                format!(
                                    "sample `{id}` has no row for source `{}`",
                                    source_ids.get_index(j).unwrap().0
                                ),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Sample { id, truth, reports })
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(frame, source_ids.into_keys().collect(), samples)
    }

    fn parse_header(&self, header: &csv::StringRecord) -> Result<(Frame, Columns)> {
        let find = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| self.err(1, format!("missing column `{name}`")))
        };
        let cols = Columns {
            sample: find("sample_id")?,
            truth: find(self.truth_column)?,
            source: find("source_id")?,
            label: find("label")?,
            scores: header
                .iter()
                .enumerate()
                .filter(|(_, h)| h.starts_with(SCORE_PREFIX))
                .map(|(i, _)| i)
                .collect(),
        };
        let classes: Vec<&str> = cols
            .scores
            .iter()
            .map(|&i| &header[i][SCORE_PREFIX.len()..])
            .collect();
        let frame = Frame::new(classes.iter().copied()).map_err(|e| self.err(1, e.to_string()))?;
        Ok((frame, cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
sample_id,true_class,source_id,label,score_sable,score_roche
0,sable,a,sable,0.900000000,0.100000000
0,sable,b,roche,0.200000000,0.800000000
1,roche,a,roche,0.000000000,1.000000000
1,roche,b,roche,0.300000000,0.700000000
";

    fn read(text: &str) -> Result<Dataset> {
        Dataset::read_csv(text.as_bytes(), Path::new("mem.csv"), DEFAULT_TRUTH_COLUMN)
    }

    #[test]
    fn parses_and_rewrites_identically() {
        let d = read(GOOD).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.source_ids(), &["a".to_string(), "b".to_string()]);
        assert_eq!(d.samples()[0].reports[1].label, 1);
        assert_eq!(d.samples()[1].truth, 1);
        assert_eq!(d.to_csv_string().unwrap(), GOOD);
    }

    #[test]
    fn out_of_range_score_names_line() {
        let bad = GOOD.replace("0,sable,b,roche,0.200000000", "0,sable,b,roche,1.200000000");
        let err = read(&bad).unwrap_err();
        match err {
            FusionError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("outside"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_inputs_are_errors() {
        assert!(matches!(read(""), Err(FusionError::Parse { line: 1, .. })));
        let header_only = GOOD.lines().next().unwrap().to_string() + "\n";
        assert!(matches!(read(&header_only), Err(FusionError::Parse { .. })));
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let unknown = GOOD.replace("1,roche,a,roche", "1,roche,a,gravier");
        assert!(matches!(
            read(&unknown),
            Err(FusionError::Parse { line: 4, .. })
        ));

        let short = GOOD.replace(",0.300000000,0.700000000", ",0.3");
        assert!(matches!(
            read(&short),
            Err(FusionError::Parse { line: 5, .. })
        ));

        let missing = GOOD.lines().take(4).collect::<Vec<_>>().join("\n") + "\n";
        assert!(matches!(read(&missing), Err(FusionError::Parse { .. })));

        let inconsistent = GOOD.replace("1,roche,b", "1,sable,b");
        assert!(read(&inconsistent).is_err());

        let nan = GOOD.replace("0.900000000", "abc");
        assert!(matches!(
            read(&nan),
            Err(FusionError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn truth_column_is_configurable() {
        let renamed = GOOD.replacen("true_class", "truth", 1);
        let d = Dataset::read_csv(renamed.as_bytes(), Path::new("m"), "truth").unwrap();
        assert_eq!(d, read(GOOD).unwrap());
        assert!(read(&renamed).is_err());
    }

    #[test]
    fn quantized_scores_survive_formatting() {
        for x in [0.0, 1.0, 0.123_456_789_4, 0.3, 2.0 / 3.0, 1e-10] {
            let q = quantize_score(x);
            assert_eq!(format_score(q).parse::<f64>().unwrap(), q);
        }
    }
}
