//! Dataset representation, KEEL/CSV parsing, stratified splitting and class
//! bookkeeping.
//!
//! Class roles are normalized at parse time: the rarer class is always
//! [`ClassLabel::Minority`]. When both classes have the same count, the class
//! whose name sorts first lexicographically becomes the minority. Everything
//! downstream relies on this and never re-checks which label is rare.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of features.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Instance(Vec<f64>);

impl Instance {
    pub fn new(features: Vec<f64>) -> Self {
        Instance(features)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Euclidean distance to another instance of the same length.
    pub fn distance(&self, other: &[f64]) -> f64 {
        euclidean(&self.0, other)
    }
}

impl Deref for Instance {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Instance {
    fn from(v: Vec<f64>) -> Self {
        Instance(v)
    }
}

impl From<&[f64]> for Instance {
    fn from(v: &[f64]) -> Self {
        Instance(v.to_vec())
    }
}

pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

/// Componentwise mean of a nonempty set of equal-length vectors.
pub fn mean_vector<'a, I>(rows: I) -> Option<Instance>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut iter = rows.into_iter();
    let first = iter.next()?;
    let mut sum = first.to_vec();
    let mut count = 1usize;
    for row in iter {
        for (s, v) in sum.iter_mut().zip(row) {
            *s += v;
        }
        count += 1;
    }
    let n = count as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    Some(Instance(sum))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    Majority,
    Minority,
}

impl ClassLabel {
    pub fn opposite(self) -> Self {
        match self {
            ClassLabel::Majority => ClassLabel::Minority,
            ClassLabel::Minority => ClassLabel::Majority,
        }
    }

    fn index(self) -> usize {
        match self {
            ClassLabel::Majority => 0,
            ClassLabel::Minority => 1,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Majority => f.write_str("majority"),
            ClassLabel::Minority => f.write_str("minority"),
        }
    }
}

/// Column names and the original class strings behind each role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub feature_names: Vec<String>,
    pub label_name: String,
    /// Original class strings, indexed by role (majority first).
    pub class_names: [String; 2],
}

impl Schema {
    /// Generic names `f1..fN`, label column `class`, classes `negative`/`positive`.
    pub fn generic(n_features: usize) -> Self {
        Schema {
            feature_names: (1..=n_features).map(|i| format!("f{i}")).collect(),
            label_name: "class".to_string(),
            class_names: ["negative".to_string(), "positive".to_string()],
        }
    }

    pub fn class_name(&self, label: ClassLabel) -> &str {
        &self.class_names[label.index()]
    }
}

/// Feature matrix plus binary labels.
///
/// Equality compares schema, instances and labels; the provenance string is
/// informational and does not take part.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: Schema,
    instances: Vec<Instance>,
    labels: Vec<ClassLabel>,
    source: String,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema
            && self.instances == other.instances
            && self.labels == other.labels
    }
}

impl Dataset {
    pub fn new(
        schema: Schema,
        instances: Vec<Instance>,
        labels: Vec<ClassLabel>,
        source: impl Into<String>,
    ) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::Validation("dataset has no rows".into()));
        }
        if instances.len() != labels.len() {
            return Err(Error::Validation(format!(
                "{} instances but {} labels",
                instances.len(),
                labels.len()
            )));
        }
        let dim = schema.feature_names.len();
        for (i, inst) in instances.iter().enumerate() {
            if inst.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: inst.len(),
                });
            }
            if !inst.is_finite() {
                return Err(Error::Validation(format!("row {i} has a non-finite value")));
            }
        }
        Ok(Dataset {
            schema,
            instances,
            labels,
            source: source.into(),
        })
    }

    /// Builds a dataset with [`Schema::generic`] names.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<ClassLabel>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        Dataset::new(
            Schema::generic(dim),
            rows.into_iter().map(Instance).collect(),
            labels,
            "in-memory",
        )
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.schema.feature_names.len()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn instance(&self, row: usize) -> &Instance {
        &self.instances[row]
    }

    pub fn label(&self, row: usize) -> ClassLabel {
        self.labels[row]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&Instance, ClassLabel)> {
        self.instances.iter().zip(self.labels.iter().copied())
    }

    /// `(majority count, minority count)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let min = self
            .labels
            .iter()
            .filter(|l| **l == ClassLabel::Minority)
            .count();
        (self.len() - min, min)
    }

    pub fn count(&self, label: ClassLabel) -> usize {
        self.labels.iter().filter(|l| **l == label).count()
    }

    /// `|Maj| / |Min|`; infinite when there is no minority row.
    pub fn imbalance_ratio(&self) -> f64 {
        let (maj, min) = self.class_counts();
        maj as f64 / min as f64
    }

    pub fn require_both_classes(&self) -> Result<()> {
        let (maj, min) = self.class_counts();
        if maj == 0 || min == 0 {
            return Err(Error::Validation(
                "both classes must be present".to_string(),
            ));
        }
        Ok(())
    }

    /// Rows with the given label, in row order.
    pub fn instances_of(&self, label: ClassLabel) -> Vec<Instance> {
        self.rows()
            .filter(|(_, l)| *l == label)
            .map(|(x, _)| x.clone())
            .collect()
    }

    /// A dataset holding the given rows (in the given order).
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            instances: rows.iter().map(|&i| self.instances[i].clone()).collect(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            source: self.source.clone(),
        }
    }

    /// This dataset with extra rows of one class appended.
    pub fn with_appended(&self, extra: Vec<Instance>, label: ClassLabel) -> Result<Dataset> {
        let mut instances = self.instances.clone();
        let mut labels = self.labels.clone();
        labels.extend(std::iter::repeat(label).take(extra.len()));
        instances.extend(extra);
        Dataset::new(self.schema.clone(), instances, labels, self.source.clone())
    }

    /// Same rows with each instance replaced; used by feature scaling.
    pub fn map_instances(&self, mut f: impl FnMut(&Instance) -> Instance) -> Result<Dataset> {
        Dataset::new(
            self.schema.clone(),
            self.instances.iter().map(&mut f).collect(),
            self.labels.clone(),
            self.source.clone(),
        )
    }

    /// Reassigns class roles so that `class_name` is the minority.
    ///
    /// Useful when re-reading a balanced output where the count-based rule
    /// cannot tell which class was originally rare.
    pub fn with_minority_class(&self, class_name: &str) -> Result<Dataset> {
        let names = &self.schema.class_names;
        if names[ClassLabel::Minority.index()] == class_name {
            return Ok(self.clone());
        }
        if names[ClassLabel::Majority.index()] != class_name {
            return Err(Error::Validation(format!("unknown class '{class_name}'")));
        }
        let mut out = self.clone();
        out.schema.class_names.swap(0, 1);
        out.labels.iter_mut().for_each(|l| *l = l.opposite());
        Ok(out)
    }
}

/// Maps raw class strings to roles: rarer class is minority, ties go to the
/// lexicographically first name.
fn assign_roles(raw: &[String], classes: Classes) -> Result<([String; 2], Vec<ClassLabel>)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in raw {
        *counts.entry(c.as_str()).or_default() += 1;
    }
    match counts.len() {
        0 => return Err(Error::Validation("dataset has no rows".into())),
        1 if classes == Classes::AllowSingle => {
            let only = counts.keys().next().unwrap().to_string();
            return Ok(([only, String::new()], vec![ClassLabel::Majority; raw.len()]));
        }
        1 => {
            return Err(Error::Validation(format!(
                "only one class present ('{}')",
                counts.keys().next().unwrap()
            )))
        }
        2 => {}
        k => {
            return Err(Error::Validation(format!(
                "expected a binary problem, found {k} classes"
            )))
        }
    }
    let mut it = counts.iter();
    let (first, n_first) = it.next().unwrap();
    let (second, n_second) = it.next().unwrap();
    // BTreeMap iterates in name order, so on a tie `first` is minority.
    let (minority, majority) = if n_second < n_first {
        (*second, *first)
    } else {
        (*first, *second)
    };
    let labels = raw
        .iter()
        .map(|c| {
            if c == minority {
                ClassLabel::Minority
            } else {
                ClassLabel::Majority
            }
        })
        .collect();
    Ok(([majority.to_string(), minority.to_string()], labels))
}

fn parse_feature(token: &str, line: usize, row: usize, column: &str) -> Result<f64> {
    if token.is_empty() || token == "?" {
        return Err(Error::parse(
            line,
            format!("data row {row}: missing value for '{column}'"),
        ));
    }
    let v: f64 = token.parse().map_err(|_| {
        Error::parse(
            line,
            format!("data row {row}: non-numeric value '{token}' for '{column}'"),
        )
    })?;
    if !v.is_finite() {
        return Err(Error::parse(
            line,
            format!("data row {row}: non-finite value '{token}' for '{column}'"),
        ));
    }
    Ok(v)
}

#[derive(Debug)]
enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug)]
struct Attribute {
    name: String,
    kind: AttributeKind,
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute> {
    let rest = rest.trim();
    let split = rest
        .find(|c: char| c.is_whitespace() || c == '{')
        .ok_or_else(|| Error::parse(line, "@attribute without a type"))?;
    let name = rest[..split].trim().to_string();
    let spec = rest[split..].trim();
    if name.is_empty() || spec.is_empty() {
        return Err(Error::parse(line, "@attribute needs a name and a type"));
    }
    if let Some(body) = spec.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| Error::parse(line, "unterminated nominal value list"))?;
        let values = body
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        return Ok(Attribute {
            name,
            kind: AttributeKind::Nominal(values),
        });
    }
    let lower = spec.to_ascii_lowercase();
    if ["real", "integer", "numeric"]
        .iter()
        .any(|t| lower.starts_with(t))
    {
        Ok(Attribute {
            name,
            kind: AttributeKind::Numeric,
        })
    } else {
        Err(Error::parse(line, format!("unsupported attribute type '{spec}'")))
    }
}

fn name_list(rest: &str) -> Vec<String> {
    rest.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parses a KEEL `.dat` document.
///
/// The class attribute is the one named by `@outputs`, or the last
/// `@attribute` when no `@outputs` line is present. Every other attribute must
/// be numeric. Rows with missing values (`?`) are rejected.
pub fn parse_keel(text: &str) -> Result<Dataset> {
    parse_keel_with(text, Classes::RequireBoth)
}

/// How many classes a parsed file may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classes {
    /// Exactly two; the usual setting for resampling.
    RequireBoth,
    /// One or two. A single class is labeled majority and the minority name
    /// is left empty. Used by inspection tools.
    AllowSingle,
}

/// [`parse_keel`] with a choice of class policy.
pub fn parse_keel_with(text: &str, classes: Classes) -> Result<Dataset> {
    let mut relation = String::new();
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut inputs: Option<(usize, Vec<String>)> = None;
    let mut output: Option<(usize, String)> = None;
    let mut in_data = false;
    let mut layout: Option<(usize, Vec<usize>)> = None;
    let mut instances = Vec::new();
    let mut raw_classes = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let Some(directive) = line.strip_prefix('@') else {
                return Err(Error::parse(line_no, "expected a header directive before @data"));
            };
            let (keyword, rest) = directive
                .split_once(char::is_whitespace)
                .unwrap_or((directive, ""));
            match keyword.to_ascii_lowercase().as_str() {
                "relation" => relation = rest.trim().to_string(),
                "attribute" => attributes.push(parse_attribute(rest, line_no)?),
                "inputs" | "input" => inputs = Some((line_no, name_list(rest))),
                "outputs" | "output" => {
                    let names = name_list(rest);
                    if names.len() != 1 {
                        return Err(Error::parse(line_no, "exactly one output attribute expected"));
                    }
                    output = Some((line_no, names.into_iter().next().unwrap()));
                }
                "data" => {
                    layout = Some(resolve_layout(&attributes, &inputs, &output, line_no)?);
                    in_data = true;
                }
                other => {
                    return Err(Error::parse(line_no, format!("unknown directive '@{other}'")));
                }
            }
            continue;
        }

        let (class_pos, feature_pos) = layout.as_ref().unwrap();
        let row = instances.len() + 1;
        let tokens: Vec<&str> = line.split(',').map(str::trim).collect();
        if tokens.len() != attributes.len() {
            return Err(Error::parse(
                line_no,
                format!(
                    "data row {row}: expected {} values, found {}",
                    attributes.len(),
                    tokens.len()
                ),
            ));
        }
        let mut features = Vec::with_capacity(feature_pos.len());
        for &p in feature_pos {
            features.push(parse_feature(tokens[p], line_no, row, &attributes[p].name)?);
        }
        let class = tokens[*class_pos];
        if class.is_empty() || class == "?" {
            return Err(Error::parse(line_no, format!("data row {row}: missing class")));
        }
        if let AttributeKind::Nominal(values) = &attributes[*class_pos].kind {
            if !values.iter().any(|v| v == class) {
                return Err(Error::parse(
                    line_no,
                    format!("data row {row}: class '{class}' not declared"),
                ));
            }
        }
        instances.push(Instance(features));
        raw_classes.push(class.to_string());
    }

    let Some((class_pos, feature_pos)) = layout else {
        return Err(Error::parse(text.lines().count().max(1), "missing @data section"));
    };
    let (class_names, labels) = assign_roles(&raw_classes, classes)?;
    let schema = Schema {
        feature_names: feature_pos
            .iter()
            .map(|&p| attributes[p].name.clone())
            .collect(),
        label_name: attributes[class_pos].name.clone(),
        class_names,
    };
    let source = if relation.is_empty() {
        "keel".to_string()
    } else {
        format!("keel:{relation}")
    };
    Dataset::new(schema, instances, labels, source)
}

fn resolve_layout(
    attributes: &[Attribute],
    inputs: &Option<(usize, Vec<String>)>,
    output: &Option<(usize, String)>,
    data_line: usize,
) -> Result<(usize, Vec<usize>)> {
    if attributes.is_empty() {
        return Err(Error::parse(data_line, "no @attribute lines before @data"));
    }
    let position = |name: &str| attributes.iter().position(|a| a.name == name);
    let class_pos = match output {
        Some((line, name)) => position(name)
            .ok_or_else(|| Error::parse(*line, format!("unknown output attribute '{name}'")))?,
        None => attributes.len() - 1,
    };
    if let Some((line, names)) = inputs {
        if let Some(bad) = names.iter().find(|n| position(n).is_none()) {
            return Err(Error::parse(*line, format!("unknown input attribute '{bad}'")));
        }
    }
    let mut features = Vec::new();
    for (i, a) in attributes.iter().enumerate() {
        if i == class_pos {
            continue;
        }
        if let AttributeKind::Nominal(_) = a.kind {
            return Err(Error::parse(
                data_line,
                format!("attribute '{}' is nominal; only numeric features are supported", a.name),
            ));
        }
        features.push(i);
    }
    Ok((class_pos, features))
}

/// Which CSV column holds the class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
    /// The rightmost column.
    Last,
}

impl LabelColumn {
    /// Interprets user input: a header name if one matches, otherwise a
    /// zero-based index when the text is an integer.
    /// Empty input means the last column.
    pub fn resolve(spec: &str, header: &[&str]) -> LabelColumn {
        if spec.is_empty() {
            return LabelColumn::Last;
        }
        if header.contains(&spec) {
            return LabelColumn::Name(spec.to_string());
        }
        match spec.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(spec.to_string()),
        }
    }
}

impl From<&str> for LabelColumn {
    fn from(s: &str) -> Self {
        LabelColumn::Name(s.to_string())
    }
}

impl From<usize> for LabelColumn {
    fn from(i: usize) -> Self {
        LabelColumn::Index(i)
    }
}

/// Parses a headed CSV document. All columns except the label are features.
pub fn parse_csv(text: &str, label_column: impl Into<LabelColumn>) -> Result<Dataset> {
    parse_csv_with(text, label_column, Classes::RequireBoth)
}

/// [`parse_csv`] with a choice of class policy.
pub fn parse_csv_with(
    text: &str,
    label_column: impl Into<LabelColumn>,
    classes: Classes,
) -> Result<Dataset> {
    let label_column = label_column.into();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::parse(1, "missing header row"));
    }
    let label_pos = match &label_column {
        LabelColumn::Last => header.len() - 1,
        LabelColumn::Index(i) if *i < header.len() => *i,
        LabelColumn::Index(i) => {
            return Err(Error::Validation(format!(
                "label column index {i} out of range for {} columns",
                header.len()
            )))
        }
        LabelColumn::Name(n) => header
            .iter()
            .position(|h| h == n)
            .ok_or_else(|| Error::Validation(format!("unknown label column '{n}'")))?,
    };

    let mut instances = Vec::new();
    let mut raw_classes = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let row = instances.len() + 1;
        if record.len() != header.len() {
            return Err(Error::parse(
                line,
                format!(
                    "data row {row}: expected {} fields, found {}",
                    header.len(),
                    record.len()
                ),
            ));
        }
        let mut features = Vec::with_capacity(header.len() - 1);
        for (i, field) in record.iter().enumerate() {
            if i != label_pos {
                features.push(parse_feature(field, line, row, &header[i])?);
            }
        }
        let class = &record[label_pos];
        if class.is_empty() || class == "?" {
            return Err(Error::parse(line, format!("data row {row}: missing class")));
        }
        instances.push(Instance(features));
        raw_classes.push(class.to_string());
    }
    let (class_names, labels) = assign_roles(&raw_classes, classes)?;
    let schema = Schema {
        feature_names: header
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != label_pos)
            .map(|(_, h)| h.clone())
            .collect(),
        label_name: header[label_pos].clone(),
        class_names,
    };
    Dataset::new(schema, instances, labels, "csv")
}

/// Serializes to CSV: feature columns followed by the label column.
///
/// Values use the shortest representation that parses back to the same
/// `f64`, so `parse_csv(write_csv(d), label) == d`.
pub fn write_csv(d: &Dataset) -> Result<String> {
    if d.n_features() == 0 {
        return Err(Error::Validation("cannot write a dataset without features".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let schema = d.schema();
    w.write_record(
        schema
            .feature_names
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(schema.label_name.as_str())),
    )?;
    let mut record: Vec<String> = Vec::with_capacity(d.n_features() + 1);
    for (x, label) in d.rows() {
        record.clear();
        record.extend(x.iter().map(|v| v.to_string()));
        record.push(schema.class_name(label).to_string());
        w.write_record(&record)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Validation(format!("csv writer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `(majority row indices, minority row indices)`, each in row order.
pub fn class_partition(d: &Dataset) -> (Vec<usize>, Vec<usize>) {
    let mut maj = Vec::new();
    let mut min = Vec::new();
    for (i, l) in d.labels().iter().enumerate() {
        match l {
            ClassLabel::Majority => maj.push(i),
            ClassLabel::Minority => min.push(i),
        }
    }
    (maj, min)
}

/// Per-class random split. Each class contributes
/// `round(train_fraction * class size)` rows to the training part.
/// Both parts keep the original row order.
pub fn stratified_split<R: Rng + ?Sized>(
    d: &Dataset,
    train_fraction: f64,
    rng: &mut R,
) -> Result<(Dataset, Dataset)> {
    let (train, test) = stratified_split_rows(d, train_fraction, rng)?;
    Ok((d.subset(&train), d.subset(&test)))
}

/// Row indices behind [`stratified_split`], each part ascending.
pub fn stratified_split_rows<R: Rng + ?Sized>(
    d: &Dataset,
    train_fraction: f64,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Validation(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let (maj, min) = class_partition(d);
    let mut train = Vec::with_capacity(d.len());
    let mut test = Vec::with_capacity(d.len());
    for (label, mut rows) in [(ClassLabel::Majority, maj), (ClassLabel::Minority, min)] {
        let n_train = (train_fraction * rows.len() as f64).round() as usize;
        if n_train == 0 || n_train >= rows.len() {
            return Err(Error::Validation(format!(
                "{label} class ({} rows) is too small to appear in both splits",
                rows.len()
            )));
        }
        rows.shuffle(rng);
        train.extend_from_slice(&rows[..n_train]);
        test.extend_from_slice(&rows[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Per-feature min-max scaling to `[0, 1]`, fitted on one dataset and
/// applicable to others. Constant features map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    mins: Vec<f64>,
    ranges: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(d: &Dataset) -> Self {
        let dim = d.n_features();
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        for x in d.instances() {
            for (j, v) in x.iter().enumerate() {
                mins[j] = mins[j].min(*v);
                maxs[j] = maxs[j].max(*v);
            }
        }
        let ranges = mins.iter().zip(&maxs).map(|(lo, hi)| hi - lo).collect();
        MinMaxScaler { mins, ranges }
    }

    pub fn transform(&self, d: &Dataset) -> Result<Dataset> {
        if d.n_features() != self.mins.len() {
            return Err(Error::Dimension {
                expected: self.mins.len(),
                found: d.n_features(),
            });
        }
        d.map_instances(|x| {
            Instance(
                x.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        if self.ranges[j] > 0.0 {
                            (v - self.mins[j]) / self.ranges[j]
                        } else {
                            0.0
                        }
                    })
                    .collect(),
            )
        })
    }
}
