//! Line-oriented background files.
//!
//! ```text
//! id = alpha-ppwave
//! note = free text
//!
//! [chart]
//! lorentz = u x1 x2 x3 v
//! riemann = y1 y2 y3 y4 y5 y6
//!
//! [metric.lorentz]
//! g(u,u) = u^2/6*(x1^2 + x2^2 + x3^2)
//! g(u,v) = 1
//! singular(z) = 0
//!
//! [flux]
//! phi = 1
//! alpha = u ^ u x1 x2 x3
//!
//! [sample]
//! default = -1 1
//! z = 0.5 1.5
//! points = 100
//! ```
//!
//! Comments start with `#`. In flux lines the last `^` separates the
//! coefficient from the wedge monomial; repeated lines for a piece add up.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::exprlang::{parse, Chart, Expr, ExprError};
use crate::exterior::{KForm, Metric, SingularHyperplane};
use crate::geometry::{ProductStructure, LORENTZ_DIM, RIEMANN_DIM};
use crate::sugra::{Background, FluxSpec, SampleBox, SugraError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Error)]
pub enum FileError {
    #[error("{at}: {msg}")]
    Syntax { at: Position, msg: String },
    #[error("{at}: {source}")]
    Expr {
        at: Position,
        #[source]
        source: ExprError,
    },
    #[error("{at}: block violation: {msg}")]
    BlockViolation { at: Position, msg: String },
    #[error("file is empty")]
    Empty,
    #[error("missing {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Errors raised after parsing, while assembling the background.
#[derive(Debug, Clone, Error)]
pub enum BuildError {
    #[error(transparent)]
    Sugra(#[from] SugraError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Form(#[from] crate::exterior::FormError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Run settings a file may carry; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileSettings {
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

/// Parsed file contents, before assembly.
#[derive(Debug, Clone)]
pub struct BackgroundFile {
    pub id: String,
    pub note: String,
    pub lorentz: Chart,
    pub riemann: Chart,
    /// Upper-triangular entries on the factor charts.
    pub lorentz_metric: Vec<(usize, usize, Expr)>,
    pub riemann_metric: Vec<(usize, usize, Expr)>,
    pub lorentz_singular: Vec<SingularHyperplane>,
    pub riemann_singular: Vec<SingularHyperplane>,
    pub flux: FluxSpec,
    pub sample: SampleBox,
    pub settings: FileSettings,
}

const FORM_PIECES: [(&str, usize, bool); 8] = [
    ("alpha", 4, true),
    ("beta", 3, true),
    ("nu", 1, false),
    ("gamma", 2, true),
    ("delta", 2, false),
    ("varpi", 1, true),
    ("epsilon", 3, false),
    ("theta", 4, false),
];

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Top,
    Chart,
    Lorentz,
    Riemann,
    Flux,
    Sample,
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    /// Byte offset of `text` in the raw line.
    offset: usize,
}

impl Line<'_> {
    fn at(&self, byte: usize) -> Position {
        Position {
            line: self.no,
            column: self.offset + byte + 1,
        }
    }

    fn syntax(&self, byte: usize, msg: impl Into<String>) -> FileError {
        FileError::Syntax {
            at: self.at(byte),
            msg: msg.into(),
        }
    }
}

/// Splits `key = value`; returns (key, value, byte offset of value).
fn assignment<'a>(line: &Line<'a>) -> Result<(&'a str, &'a str, usize), FileError> {
    let eq = line
        .text
        .find('=')
        .ok_or_else(|| line.syntax(0, "expected 'key = value'"))?;
    let key = line.text[..eq].trim();
    if key.is_empty() {
        return Err(line.syntax(0, "missing key"));
    }
    let rest = &line.text[eq + 1..];
    let lead = rest.len() - rest.trim_start().len();
    Ok((key, rest.trim(), eq + 1 + lead))
}

fn words(s: &str) -> Vec<&str> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .collect()
}

fn expr_at(line: &Line, text: &str, offset: usize, chart: &Chart) -> Result<Expr, FileError> {
    parse(text, chart).map_err(|e| {
        let pos = match &e {
            ExprError::Syntax { pos, .. }
            | ExprError::UnknownIdentifier { pos, .. }
            | ExprError::MalformedExponent { pos, .. } => *pos,
            _ => 0,
        };
        FileError::Expr {
            at: line.at(offset + pos),
            source: e,
        }
    })
}

fn number(line: &Line, text: &str, offset: usize) -> Result<f64, FileError> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| line.syntax(offset, format!("expected a number, got '{text}'")))
}

/// Parses `name(a,b)` or `name(a)`, returning the argument list.
fn call<'a>(key: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let inner = key.strip_prefix(name)?.trim().strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(str::trim).collect())
}

/// Index of the `^` separating coefficient from monomial: the last one at
/// parenthesis depth zero.
fn split_caret(text: &str) -> Option<usize> {
    let mut depth = 0i32;
    let mut found = None;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '^' if depth == 0 => found = Some(i),
            _ => {}
        }
    }
    found
}

struct Builder {
    id: Option<String>,
    note: String,
    lorentz: Option<Chart>,
    riemann: Option<Chart>,
    /// Raw metric and flux lines, resolved once both charts are known.
    deferred: Vec<(Section, usize)>,
    sample_default: Option<(f64, f64)>,
    sample_ranges: BTreeMap<String, (f64, f64, usize)>,
    settings: FileSettings,
}

pub fn parse_background_str(src: &str) -> Result<BackgroundFile, FileError> {
    let lines: Vec<Line> = src
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim_start();
            Line {
                no: i + 1,
                offset: body.len() - trimmed.len(),
                text: trimmed.trim_end(),
            }
        })
        .collect();
    if lines.iter().all(|l| l.text.is_empty()) {
        return Err(FileError::Empty);
    }
    let mut b = Builder {
        id: None,
        note: String::new(),
        lorentz: None,
        riemann: None,
        deferred: Vec::new(),
        sample_default: None,
        sample_ranges: BTreeMap::new(),
        settings: FileSettings::default(),
    };
    let mut section = Section::Top;
    for (k, line) in lines.iter().enumerate() {
        if line.text.is_empty() {
            continue;
        }
        if line.text.starts_with('[') {
            section = match line.text {
                "[chart]" => Section::Chart,
                "[metric.lorentz]" => Section::Lorentz,
                "[metric.riemann]" => Section::Riemann,
                "[flux]" => Section::Flux,
                "[sample]" => Section::Sample,
                other => return Err(line.syntax(0, format!("unknown section {other}"))),
            };
            continue;
        }
        let (key, value, voff) = assignment(line)?;
        match section {
            Section::Top => match key {
                "id" => b.id = Some(value.to_string()),
                "note" => b.note = value.to_string(),
                _ => return Err(line.syntax(0, format!("unknown key '{key}'"))),
            },
            Section::Chart => {
                let chart = Chart::new(&words(value)).map_err(|e| FileError::Expr {
                    at: line.at(voff),
                    source: e,
                })?;
                let (slot, dim) = match key {
                    "lorentz" => (&mut b.lorentz, LORENTZ_DIM),
                    "riemann" => (&mut b.riemann, RIEMANN_DIM),
                    _ => return Err(line.syntax(0, format!("unknown chart '{key}'"))),
                };
                if chart.dim() != dim {
                    return Err(line.syntax(voff, format!("{key} chart needs {dim} coordinates")));
                }
                *slot = Some(chart);
            }
            Section::Sample => {
                let parts = words(value);
                match key {
                    "points" => {
                        b.settings.points = Some(
                            value
                                .parse()
                                .map_err(|_| line.syntax(voff, "expected a point count"))?,
                        )
                    }
                    "seed" => {
                        b.settings.seed =
                            Some(value.parse().map_err(|_| line.syntax(voff, "expected a seed"))?)
                    }
                    "tolerance" => b.settings.tolerance = Some(number(line, value, voff)?),
                    _ => {
                        if parts.len() != 2 {
                            return Err(line.syntax(voff, "expected 'lo hi'"));
                        }
                        let lo = number(line, parts[0], voff)?;
                        let hi = number(line, parts[1], voff)?;
                        if lo >= hi {
                            return Err(line.syntax(voff, "empty range"));
                        }
                        if key == "default" {
                            b.sample_default = Some((lo, hi));
                        } else {
                            b.sample_ranges.insert(key.to_string(), (lo, hi, k));
                        }
                    }
                }
            }
            s => b.deferred.push((s, k)),
        }
    }
    let id = b.id.ok_or(FileError::Missing("id"))?;
    let lorentz = b.lorentz.ok_or(FileError::Missing("lorentz chart"))?;
    let riemann = b.riemann.ok_or(FileError::Missing("riemann chart"))?;
    let product = lorentz
        .product(&riemann)
        .map_err(|e| FileError::Build(BuildError::Expr(e)))?;

    let mut metrics: [Vec<(usize, usize, Expr)>; 2] = [Vec::new(), Vec::new()];
    let mut singular: [Vec<SingularHyperplane>; 2] = [Vec::new(), Vec::new()];
    let ps_stub = FluxStub::new(&lorentz, &riemann);
    let mut flux = ps_stub.zero();
    let mut seen_scalar: BTreeMap<&str, ()> = BTreeMap::new();
    for (section, k) in b.deferred {
        let line = &lines[k];
        let (key, value, voff) = assignment(line)?;
        match section {
            Section::Lorentz | Section::Riemann => {
                let (slot, chart) = if section == Section::Lorentz {
                    (0, &lorentz)
                } else {
                    (1, &riemann)
                };
                if let Some(args) = call(key, "g") {
                    let idx = args
                        .iter()
                        .map(|a| chart.index_of(a))
                        .collect::<Option<Vec<_>>>()
                        .filter(|v| v.len() == 2)
                        .ok_or_else(|| line.syntax(0, format!("bad metric entry '{key}'")))?;
                    let (i, j) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
                    if metrics[slot].iter().any(|(a, b, _)| (*a, *b) == (i, j)) {
                        return Err(line.syntax(0, format!("duplicate entry '{key}'")));
                    }
                    let e = block_expr(line, value, voff, &product, chart)?;
                    metrics[slot].push((i, j, e));
                } else if let Some(args) = call(key, "singular") {
                    let coord = match args.as_slice() {
                        [a] => chart.index_of(a),
                        _ => None,
                    }
                    .ok_or_else(|| line.syntax(0, format!("bad singular plane '{key}'")))?;
                    singular[slot].push(SingularHyperplane {
                        coord,
                        value: number(line, value, voff)?,
                    });
                } else {
                    return Err(line.syntax(0, format!("unknown metric key '{key}'")));
                }
            }
            Section::Flux => {
                if key == "phi" || key == "psi" {
                    if seen_scalar.insert(if key == "phi" { "phi" } else { "psi" }, ()).is_some() {
                        return Err(line.syntax(0, format!("duplicate scalar '{key}'")));
                    }
                    let chart = if key == "phi" { &riemann } else { &lorentz };
                    let e = block_expr(line, value, voff, &product, chart)?;
                    if key == "phi" {
                        flux.phi = e;
                    } else {
                        flux.psi = e;
                    }
                    continue;
                }
                let (_, degree, on_lorentz) = FORM_PIECES
                    .iter()
                    .copied()
                    .find(|(n, _, _)| *n == key)
                    .ok_or_else(|| line.syntax(0, format!("unknown flux piece '{key}'")))?;
                let chart = if on_lorentz { &lorentz } else { &riemann };
                let caret = split_caret(value)
                    .ok_or_else(|| line.syntax(voff, "expected '<coeff> ^ <coordinates>'"))?;
                let coeff = block_expr(line, &value[..caret], voff, &product, chart)?;
                let mono_off = voff + caret + 1;
                let mut idx = Vec::new();
                for w in words(&value[caret + 1..]) {
                    match chart.index_of(w) {
                        Some(i) => idx.push(i),
                        None if product.index_of(w).is_some() => {
                            return Err(FileError::BlockViolation {
                                at: line.at(mono_off),
                                msg: format!("{key} may not contain d{w}"),
                            })
                        }
                        None => {
                            return Err(line.syntax(mono_off, format!("unknown coordinate '{w}'")))
                        }
                    }
                }
                if idx.len() != degree {
                    return Err(line.syntax(
                        mono_off,
                        format!("{key} needs {degree} coordinates, got {}", idx.len()),
                    ));
                }
                let term = KForm::monomial(chart, coeff, &idx).map_err(|e| line.syntax(mono_off, e.to_string()))?;
                let slot = flux_slot(&mut flux, key);
                *slot = slot.add(&term).map_err(|e| line.syntax(0, e.to_string()))?;
            }
            _ => unreachable!("only metric and flux lines are deferred"),
        }
    }

    let mut ranges = vec![b.sample_default.unwrap_or((-1.0, 1.0)); product.dim()];
    for (name, (lo, hi, k)) in b.sample_ranges {
        let i = product
            .index_of(&name)
            .ok_or_else(|| lines[k].syntax(0, format!("unknown coordinate '{name}'")))?;
        ranges[i] = (lo, hi);
    }
    let [lorentz_metric, riemann_metric] = metrics;
    let [lorentz_singular, riemann_singular] = singular;
    Ok(BackgroundFile {
        id,
        note: b.note,
        lorentz,
        riemann,
        lorentz_metric,
        riemann_metric,
        lorentz_singular,
        riemann_singular,
        flux,
        sample: SampleBox { ranges },
        settings: b.settings,
    })
}

/// Parses `text` on the product chart and rejects coordinates outside `block`.
fn block_expr(
    line: &Line,
    text: &str,
    offset: usize,
    product: &Chart,
    block: &Chart,
) -> Result<Expr, FileError> {
    let e = expr_at(line, text, offset, product)?;
    let outside: Vec<&str> = e
        .coords()
        .into_iter()
        .map(|i| product.name(i))
        .filter(|n| block.index_of(n).is_none())
        .collect();
    if !outside.is_empty() {
        return Err(FileError::BlockViolation {
            at: line.at(offset),
            msg: format!("coordinates {} are outside this factor", outside.join(", ")),
        });
    }
    let shift = |i: usize| block.index_of(product.name(i)).expect("checked above");
    Ok(e.map_coords(&shift))
}

/// Zero flux on the two factor charts, without needing metrics yet.
struct FluxStub<'a> {
    l: &'a Chart,
    r: &'a Chart,
}

impl<'a> FluxStub<'a> {
    fn new(l: &'a Chart, r: &'a Chart) -> Self {
        FluxStub { l, r }
    }

    fn zero(&self) -> FluxSpec {
        FluxSpec {
            phi: Expr::one(),
            alpha: KForm::zero(self.l, 4),
            beta: KForm::zero(self.l, 3),
            nu: KForm::zero(self.r, 1),
            gamma: KForm::zero(self.l, 2),
            delta: KForm::zero(self.r, 2),
            varpi: KForm::zero(self.l, 1),
            epsilon: KForm::zero(self.r, 3),
            psi: Expr::one(),
            theta: KForm::zero(self.r, 4),
        }
    }
}

pub(crate) fn flux_slot<'a>(f: &'a mut FluxSpec, name: &str) -> &'a mut KForm {
    match name {
        "alpha" => &mut f.alpha,
        "beta" => &mut f.beta,
        "nu" => &mut f.nu,
        "gamma" => &mut f.gamma,
        "delta" => &mut f.delta,
        "varpi" => &mut f.varpi,
        "epsilon" => &mut f.epsilon,
        "theta" => &mut f.theta,
        _ => unreachable!("piece names are validated by the caller"),
    }
}

pub(crate) fn is_form_piece(name: &str) -> bool {
    FORM_PIECES.iter().any(|(n, _, _)| *n == name)
}

impl BackgroundFile {
    pub fn build(&self) -> Result<Background, BuildError> {
        let l = Metric::from_upper(&self.lorentz, &self.lorentz_metric, (1, 4))?
            .with_singular(self.lorentz_singular.clone());
        let r = Metric::from_upper(&self.riemann, &self.riemann_metric, (0, 6))?
            .with_singular(self.riemann_singular.clone());
        let ps = ProductStructure::new(l, r)?;
        Ok(Background::new(
            &self.id,
            &self.note,
            ps,
            self.flux.clone(),
            self.sample.clone(),
        )?)
    }
}

pub fn parse_background_file(path: &std::path::Path) -> Result<BackgroundFile, FileError> {
    let src = std::fs::read_to_string(path).map_err(|e| FileError::Syntax {
        at: Position { line: 0, column: 0 },
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_background_str(&src)
}
