//! Intrinsic-formality certificates.
//!
//! A certificate lists, for every `q > 2`, a reason why `HH^{q,2-q}(A, A)`
//! vanishes. Tails over all `p` (with `q = 2p` or `q = 2p + 1`) are chains of
//! affine functions of `p` linked by `<`, `≤` or `=`; a link holds for every
//! `p ≥ p_min` once it holds at `p_min` and the slope difference is
//! nonnegative. Small `q` may instead be covered by a divisibility argument.
//!
//! [`recheck`] replays a certificate from its serialized form alone.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs larger than this in absolute value are refused, so that every
/// instantiated inequality fits comfortably in `i64`.
pub const PARAM_LIMIT: i64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    CertifiedFormal,
    CriterionInapplicable,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedFormal => "CertifiedFormal",
            Verdict::CriterionInapplicable => "CriterionInapplicable",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DegreeBound,
    GcdDivisibility,
    DirectHh,
    PeriodicResolution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn q(self, p: i64) -> i64 {
        match self {
            Parity::Even => 2 * p,
            Parity::Odd => 2 * p + 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    Lt,
    Le,
    Eq,
}

impl Link {
    fn symbol(self) -> &'static str {
        match self {
            Link::Lt => "<",
            Link::Le => "≤",
            Link::Eq => "=",
        }
    }
}

/// `slope · p + intercept`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affine {
    pub slope: i64,
    pub intercept: i64,
}

impl Affine {
    pub const fn new(slope: i64, intercept: i64) -> Self {
        Affine { slope, intercept }
    }

    pub fn at(self, p: i64) -> i64 {
        self.slope * p + self.intercept
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lin = match self.slope {
            0 => String::new(),
            1 => "p".to_string(),
            -1 => "-p".to_string(),
            s => format!("{s}p"),
        };
        match (lin.is_empty(), self.intercept) {
            (true, c) => write!(f, "{c}"),
            (false, 0) => f.write_str(&lin),
            (false, c) if c > 0 => write!(f, "{lin}+{c}"),
            (false, c) => write!(f, "{lin}{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTerm {
    /// Symbolic form, e.g. `ph+2p`.
    pub label: String,
    pub value: Affine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QRange {
    /// `None` means both parities.
    pub parity: Option<Parity>,
    pub q_min: i64,
    /// `None` for an unbounded tail.
    pub q_max: Option<i64>,
}

impl QRange {
    pub fn contains(&self, q: i64) -> bool {
        let parity_ok = match self.parity {
            None => true,
            Some(Parity::Even) => q % 2 == 0,
            Some(Parity::Odd) => q % 2 == 1,
        };
        parity_ok && q >= self.q_min && self.q_max.is_none_or(|m| q <= m)
    }
}

impl fmt::Display for QRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let form = match self.parity {
            Some(Parity::Even) => "q = 2p",
            Some(Parity::Odd) => "q = 2p+1",
            None => "q",
        };
        match self.q_max {
            Some(m) if m == self.q_min => write!(f, "q = {m}"),
            Some(m) => write!(f, "{form}, {} ≤ q ≤ {m}", self.q_min),
            None => write!(f, "{form}, q ≥ {}", self.q_min),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub p: i64,
    pub q: i64,
    pub values: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdData {
    /// Degrees generating the grading of `A`.
    pub degrees: Vec<i64>,
    pub gcd: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectData {
    pub q: i64,
    pub internal_degree: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub method: Method,
    pub q_range: QRange,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_min: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<ChainTerm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<Link>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gcd: Option<GcdData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct: Option<DirectData>,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instances: Vec<Instance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Subject {
    Single { n: i64, k: i64 },
    PnConfig { n: i64, k: i64, h: i64 },
    Spherical { k: i64, h_min: i64, h_max: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalityCertificate {
    pub subject: Subject,
    pub verdict: Verdict,
    pub failed_hypotheses: Vec<String>,
    pub remarks: Vec<String>,
    /// Set for the mirrored (negative degree) mode.
    pub experimental: bool,
    pub evidence: Vec<Evidence>,
}

fn check_params(params: &[(&str, i64)]) -> Result<()> {
    for (name, v) in params {
        if v.abs() > PARAM_LIMIT {
            return Err(Error::invalid(format!("{name} = {v} exceeds the supported range ±{PARAM_LIMIT}")));
        }
    }
    Ok(())
}

/// Number of `p` values listed in each chain's instances.
const INSTANCE_COUNT: i64 = 3;

fn link_holds(link: Link, a: Affine, b: Affine, p0: i64) -> bool {
    let slope = b.slope - a.slope;
    let diff = b.at(p0) - a.at(p0);
    match link {
        Link::Lt => slope >= 0 && diff > 0,
        Link::Le => slope >= 0 && diff >= 0,
        Link::Eq => slope == 0 && diff == 0,
    }
}

fn chain_evidence(method: Method, parity: Parity, p_min: i64, chain: Vec<ChainTerm>, links: Vec<Link>) -> Evidence {
    debug_assert_eq!(chain.len(), links.len() + 1);
    let holds = links.contains(&Link::Lt)
        && links
            .iter()
            .enumerate()
            .all(|(i, &l)| link_holds(l, chain[i].value, chain[i + 1].value, p_min));
    let instances = (p_min..p_min + INSTANCE_COUNT)
        .map(|p| Instance {
            p,
            q: parity.q(p),
            values: chain.iter().map(|t| t.value.at(p)).collect(),
        })
        .collect();
    Evidence {
        method,
        q_range: QRange {
            parity: Some(parity),
            q_min: parity.q(p_min),
            q_max: None,
        },
        p_min: Some(p_min),
        chain,
        links,
        gcd: None,
        direct: None,
        holds,
        instances,
    }
}

fn term(label: impl Into<String>, slope: i64, intercept: i64) -> ChainTerm {
    ChainTerm {
        label: label.into(),
        value: Affine::new(slope, intercept),
    }
}

/// Tries the detailed chain first, then the bare comparison of its two ends.
/// If both fail at `p_min`, the first `q` is recorded as a failed single
/// instance and the tail restarts at `p_min + 1`.
fn tail_with_fallback(method: Method, parity: Parity, p_min: i64, chain: Vec<ChainTerm>, links: Vec<Link>) -> Vec<Evidence> {
    let detailed = chain_evidence(method, parity, p_min, chain.clone(), links);
    if detailed.holds {
        return vec![detailed];
    }
    let ends = vec![chain[0].clone(), chain.last().expect("nonempty").clone()];
    let direct = chain_evidence(method, parity, p_min, ends.clone(), vec![Link::Lt]);
    if direct.holds {
        return vec![direct];
    }
    let shifted = chain_evidence(method, parity, p_min + 1, ends.clone(), vec![Link::Lt]);
    if !shifted.holds {
        return vec![direct];
    }
    let mut failed = chain_evidence(method, parity, p_min, ends, vec![Link::Lt]);
    failed.q_range.q_max = Some(parity.q(p_min));
    failed.instances.truncate(1);
    vec![failed, shifted]
}

fn gcd_evidence(degrees: Vec<i64>) -> Evidence {
    let g = degrees.iter().fold(0i64, |acc, d| acc.gcd(d));
    Evidence {
        method: Method::GcdDivisibility,
        q_range: QRange {
            parity: None,
            q_min: 3,
            q_max: Some(3),
        },
        p_min: None,
        chain: Vec::new(),
        links: Vec::new(),
        gcd: Some(GcdData { degrees, gcd: g }),
        direct: None,
        holds: g > 1,
        instances: Vec::new(),
    }
}

/// Every `q ≥ 3` lies in the range of some evidence item that holds.
pub fn covers_all_q(evidence: &[Evidence]) -> bool {
    let good: Vec<&Evidence> = evidence.iter().filter(|e| e.holds).collect();
    let mut horizon = 3;
    for parity in [Parity::Even, Parity::Odd] {
        let tail = good
            .iter()
            .filter(|e| e.q_range.q_max.is_none() && e.q_range.parity.is_none_or(|p| p == parity))
            .map(|e| e.q_range.q_min)
            .min();
        match tail {
            Some(t) => horizon = horizon.max(t),
            None => return false,
        }
    }
    (3..=horizon).all(|q| good.iter().any(|e| e.q_range.contains(q)))
}

fn finish(subject: Subject, failed: Vec<String>, remarks: Vec<String>, experimental: bool, evidence: Vec<Evidence>) -> FormalityCertificate {
    let verdict = if !failed.is_empty() {
        Verdict::CriterionInapplicable
    } else if covers_all_q(&evidence) {
        Verdict::CertifiedFormal
    } else {
        Verdict::Inconclusive
    };
    FormalityCertificate {
        subject,
        verdict,
        failed_hypotheses: failed,
        remarks,
        experimental,
        evidence,
    }
}

/// `k[t]/t^{n+1}` with `deg t = k` via its 2-periodic resolution, whose
/// `q`-th term is generated in degree `p(n+1)k` (`q = 2p`) or
/// `(p(n+1)+1)k` (`q = 2p + 1`). `Hom^0(F^q, A(2-q))` vanishes once that
/// degree exceeds `maxdeg(A) + q - 2 = nk + q - 2`.
pub fn certify_single(n: i64, k: i64) -> Result<FormalityCertificate> {
    check_params(&[("n", n), ("k", k)])?;
    let subject = Subject::Single { n, k };
    let mut failed = Vec::new();
    if n < 1 {
        failed.push(format!("n ≥ 1 (got n = {n})"));
    }
    if k < 1 {
        failed.push(format!("k ≥ 1 (got k = {k})"));
    }
    if !failed.is_empty() {
        return Ok(finish(subject, failed, Vec::new(), false, Vec::new()));
    }
    let nk = n * k;
    let even = chain_evidence(
        Method::PeriodicResolution,
        Parity::Even,
        2,
        vec![term("nk+2p-2", 2, nk - 2), term("p(n+1)k", (n + 1) * k, 0)],
        vec![Link::Lt],
    );
    let odd = chain_evidence(
        Method::PeriodicResolution,
        Parity::Odd,
        1,
        vec![term("nk+2p-1", 2, nk - 1), term("(p(n+1)+1)k", (n + 1) * k, k)],
        vec![Link::Lt],
    );
    Ok(finish(subject, Vec::new(), Vec::new(), false, vec![even, odd]))
}

/// `h = nk/2` for an `nk`-Calabi–Yau configuration, and whether
/// `gcd(k, h) > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyNormalization {
    pub h: i64,
    pub gcd_ok: bool,
}

pub fn cy_normalize(n: i64, k: i64) -> Result<CyNormalization> {
    check_params(&[("n", n), ("k", k)])?;
    let nk = n * k;
    if nk % 2 != 0 {
        return Err(Error::invalid(format!("nk = {nk} is odd, so no symmetric edge degree exists")));
    }
    let h = nk / 2;
    Ok(CyNormalization {
        h,
        gcd_ok: k.gcd(&h) > 1,
    })
}

/// Configurations of `P^n[k]`-like objects with all edge degrees equal to `h`.
/// Negative `k` (with negative `h`) runs the mirrored criterion on the
/// degree-reversed algebra and is flagged experimental.
pub fn certify_config_pn(n: i64, k: i64, h: i64) -> Result<FormalityCertificate> {
    check_params(&[("n", n), ("k", k), ("h", h)])?;
    let subject = Subject::PnConfig { n, k, h };
    if k < 0 {
        return Ok(certify_pn_mirrored(subject, n, -k, -h));
    }
    let mut failed = Vec::new();
    if n < 2 {
        failed.push(format!("n ≥ 2 (got n = {n})"));
    }
    if k < 2 {
        failed.push(format!("k ≥ 2 (got k = {k})"));
    }
    if !(n * k <= 2 * h && h <= n * k) {
        failed.push(format!("nk/2 ≤ h ≤ nk (got nk = {}, h = {h})", n * k));
    }
    let g = k.gcd(&h);
    if g <= 1 {
        failed.push(format!("gcd(k, h) > 1 (got gcd({k}, {h}) = {g})"));
    }
    if !failed.is_empty() {
        return Ok(finish(subject, failed, Vec::new(), false, Vec::new()));
    }
    let nk = n * k;
    let even = chain_evidence(
        Method::DegreeBound,
        Parity::Even,
        2,
        vec![
            term("maxdeg(A)+q-2 = nk+2p-2", 2, nk - 2),
            term("2h+2p-2", 2, 2 * h - 2),
            term("ph+2p", h + 2, 0),
            term("ph+pk", h + k, 0),
            term("mindeg Tor_q ≥ p(h+k)", h + k, 0),
        ],
        vec![Link::Le, Link::Lt, Link::Le, Link::Le],
    );
    let odd = chain_evidence(
        Method::DegreeBound,
        Parity::Odd,
        2,
        vec![
            term("maxdeg(A)+q-2 = nk+2p-1", 2, nk - 1),
            term("2h+2p-1", 2, 2 * h - 1),
            term("ph+2p", h + 2, 0),
            term("ph+pk+k", h + k, k),
            term("mindeg Tor_q ≥ p(h+k)+k", h + k, k),
        ],
        vec![Link::Le, Link::Lt, Link::Lt, Link::Le],
    );
    let q3 = gcd_evidence(vec![k, h]);
    Ok(finish(subject, Vec::new(), Vec::new(), false, vec![q3, even, odd]))
}

/// Degree-reversed algebra `A'` with `deg t = k' > 0`, `deg a = h' > 0`:
/// `mindeg(A) + q - 2 > maxdeg Tor_q(A)` becomes
/// `nk' - q + 2 < mindeg Tor_q(A')`.
fn certify_pn_mirrored(subject: Subject, n: i64, k: i64, h: i64) -> FormalityCertificate {
    let mut failed = Vec::new();
    if n < 2 {
        failed.push(format!("n ≥ 2 (got n = {n})"));
    }
    if k < 2 {
        failed.push(format!("k ≤ -2 (got k = {})", -k));
    }
    if !(n * k <= 2 * h && h <= n * k) {
        failed.push(format!("nk/2 ≥ h ≥ nk (got nk = {}, h = {})", -n * k, -h));
    }
    let remarks = vec!["mirrored criterion for non-positively graded algebras".to_string()];
    if !failed.is_empty() {
        return finish(subject, failed, remarks, true, Vec::new());
    }
    let nk = n * k;
    let mut evidence = vec![chain_evidence(
        Method::DegreeBound,
        Parity::Even,
        2,
        vec![term("-mindeg(A)-q+2 = nk'-2p+2", -2, nk + 2), term("mindeg Tor_q(A') ≥ p(h'+k')", h + k, 0)],
        vec![Link::Lt],
    )];
    let odd_chain = vec![
        term("-mindeg(A)-q+2 = nk'-2p+1", -2, nk + 1),
        term("mindeg Tor_q(A') ≥ p(h'+k')+k'", h + k, k),
    ];
    let odd = chain_evidence(Method::DegreeBound, Parity::Odd, 1, odd_chain.clone(), vec![Link::Lt]);
    if odd.holds {
        evidence.push(odd);
    } else {
        evidence.push(gcd_evidence(vec![k, h]));
        evidence.push(chain_evidence(Method::DegreeBound, Parity::Odd, 2, odd_chain, vec![Link::Lt]));
    }
    finish(subject, Vec::new(), remarks, true, evidence)
}

/// Configurations of `k`-spherelike objects with edge degrees in
/// `[h_min, h_max]`. The bounds use `h = h_min`, so
/// `mindeg I ≥ 2h`, `mindeg J ≥ h` and `maxdeg A = k`.
pub fn certify_config_spherical(k: i64, h_min: i64, h_max: i64) -> Result<FormalityCertificate> {
    check_params(&[("k", k), ("h_min", h_min), ("h_max", h_max)])?;
    let subject = Subject::Spherical { k, h_min, h_max };
    let mut failed = Vec::new();
    let mut remarks = Vec::new();
    if k < 4 {
        failed.push(format!("k ≥ 4 (got k = {k})"));
        if k == 2 || k == 3 {
            remarks.push("open case: formality is expected for k = 2, 3 but not covered by this criterion".into());
        }
    }
    if !(k.div_euclid(2) <= h_min && h_min <= h_max && h_max <= k) {
        failed.push(format!("⌊k/2⌋ ≤ h_min ≤ h_max ≤ k (got k = {k}, h in [{h_min}, {h_max}])"));
    }
    if !failed.is_empty() {
        return Ok(finish(subject, failed, remarks, false, Vec::new()));
    }
    let h = h_min;
    let mut evidence = tail_with_fallback(
        Method::DegreeBound,
        Parity::Even,
        2,
        vec![
            term("maxdeg(A)+q-2 = k+2p-2", 2, k - 2),
            term("2h+2p-1", 2, 2 * h - 1),
            term("2h+2p", 2, 2 * h),
            term("2ph", 2 * h, 0),
            term("mindeg Tor_q ≥ 2ph", 2 * h, 0),
        ],
        vec![Link::Le, Link::Lt, Link::Le, Link::Le],
    );
    evidence.extend(tail_with_fallback(
        Method::DegreeBound,
        Parity::Odd,
        1,
        vec![
            term("maxdeg(A)+q-2 = k+2p-1", 2, k - 1),
            term("2h+2p", 2, 2 * h),
            term("2ph+h", 2 * h, h),
            term("mindeg Tor_q ≥ 2ph+h", 2 * h, h),
        ],
        vec![Link::Le, Link::Lt, Link::Le],
    ));
    let cert = finish(subject, Vec::new(), remarks, false, evidence);
    Ok(cert)
}

/// Result of replaying a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecheckReport {
    pub ok: bool,
    pub verdict: Verdict,
    pub problems: Vec<String>,
}

/// Replays a certificate using only its serialized content and the subject
/// parameters: hypotheses, chain endpoints, every link, every instance, the
/// gcd claims, `q`-coverage and the verdict.
pub fn recheck(cert: &FormalityCertificate) -> RecheckReport {
    let mut bad: Vec<String> = Vec::new();
    let gcd = |a: i128, b: i128| -> i128 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    // (hypotheses hold, mirrored, maxdeg(A), generating degrees,
    //  tail right-hand sides for (even, odd) as (slope, intercept) lists)
    type Tails = (Vec<(i128, i128)>, Vec<(i128, i128)>);
    let (hyp, mirrored, maxdeg, degrees, tails): (bool, bool, i128, Vec<i128>, Tails) = match cert.subject {
        Subject::Single { n, k } => {
            let (n, k) = (n as i128, k as i128);
            (n >= 1 && k >= 1, false, n * k, vec![k], (vec![((n + 1) * k, 0)], vec![((n + 1) * k, k)]))
        }
        Subject::PnConfig { n, k, h } => {
            let (n, mut k, mut h) = (n as i128, k as i128, h as i128);
            let mirrored = k < 0;
            if mirrored {
                (k, h) = (-k, -h);
            }
            let window = n >= 2 && k >= 2 && n * k <= 2 * h && h <= n * k;
            let hyp = window && (mirrored || gcd(k, h) > 1);
            let (mu, nu) = (h + k, k);
            (hyp, mirrored, n * k, vec![k, h], (vec![(mu, 0), (mu, 2 * nu - mu)], vec![(mu, nu)]))
        }
        Subject::Spherical { k, h_min, h_max } => {
            let (k, h) = (k as i128, h_min as i128);
            let hyp = k >= 4 && k.div_euclid(2) <= h && h <= h_max as i128 && h_max as i128 <= k;
            (hyp, false, k, vec![k, h], (vec![(2 * h, 0)], vec![(2 * h, h)]))
        }
    };
    let sign: i128 = if mirrored { -1 } else { 1 };
    for (i, e) in cert.evidence.iter().enumerate() {
        let mut ok = true;
        match e.method {
            Method::DegreeBound | Method::PeriodicResolution => {
                let (Some(p0), Some(parity)) = (e.p_min, e.q_range.parity) else {
                    bad.push(format!("item {i}: chain without p_min or parity"));
                    continue;
                };
                let c: Vec<(i128, i128)> = e.chain.iter().map(|t| (t.value.slope as i128, t.value.intercept as i128)).collect();
                let off: i128 = if parity == Parity::Odd { 1 } else { 0 };
                let p0 = p0 as i128;
                let want_lhs = (2 * sign, maxdeg + sign * (off - 2));
                let rhs_ok = match parity {
                    Parity::Even => &tails.0,
                    Parity::Odd => &tails.1,
                };
                ok &= c.len() >= 2 && c.len() == e.links.len() + 1 && c[0] == want_lhs;
                ok &= c.last().is_some_and(|r| rhs_ok.contains(r));
                ok &= e.links.contains(&Link::Lt) && e.q_range.q_min as i128 == 2 * p0 + off && p0 >= 1;
                for (j, l) in e.links.iter().enumerate().take(c.len().saturating_sub(1)) {
                    let (ds, di) = (c[j + 1].0 - c[j].0, c[j + 1].0 * p0 + c[j + 1].1 - c[j].0 * p0 - c[j].1);
                    ok &= match l {
                        Link::Lt => ds >= 0 && di > 0,
                        Link::Le => ds >= 0 && di >= 0,
                        Link::Eq => ds == 0 && di == 0,
                    };
                }
                for inst in &e.instances {
                    ok &= inst.q as i128 == 2 * inst.p as i128 + off && inst.values.len() == c.len();
                    ok &= inst.values.iter().zip(&c).all(|(v, (s, b))| *v as i128 == s * inst.p as i128 + b);
                }
                if let Some(m) = e.q_range.q_max {
                    ok &= m >= e.q_range.q_min;
                }
            }
            Method::GcdDivisibility => {
                let Some(g) = &e.gcd else {
                    bad.push(format!("item {i}: gcd evidence without data"));
                    continue;
                };
                let claimed: Vec<i128> = g.degrees.iter().map(|&d| (d as i128).abs()).collect();
                let actual = claimed.iter().fold(0, |a, &d| gcd(a, d));
                let mut expected = degrees.clone();
                expected.sort();
                let mut sorted = claimed.clone();
                sorted.sort();
                ok &= sorted == expected && actual == g.gcd as i128 && actual > 1;
                // A degree-0 map A^{⊗(q+2)} → A(2-q) needs gcd | q-2.
                ok &= (e.q_range.q_min..=e.q_range.q_max.unwrap_or(i64::MAX).min(e.q_range.q_min + 64))
                    .all(|q| (q as i128 - 2) % actual != 0)
                    && e.q_range.q_max.is_some();
            }
            Method::DirectHh => {
                ok &= e.direct.as_ref().is_some_and(|d| d.dim == 0 && Some(d.q) == e.q_range.q_max && d.q == e.q_range.q_min && d.internal_degree == 2 - d.q);
            }
        }
        if ok != e.holds {
            bad.push(format!("item {i} ({:?}, {}): claimed holds = {}, replay gives {}", e.method, e.q_range, e.holds, ok));
        }
    }
    let verdict = if !hyp {
        Verdict::CriterionInapplicable
    } else if covers_all_q(&cert.evidence) {
        Verdict::CertifiedFormal
    } else {
        Verdict::Inconclusive
    };
    if verdict != cert.verdict {
        bad.push(format!("verdict {} does not follow from the evidence ({verdict})", cert.verdict));
    }
    if hyp != cert.failed_hypotheses.is_empty() {
        bad.push("failed hypotheses do not match the subject".into());
    }
    RecheckReport {
        ok: bad.is_empty(),
        verdict,
        problems: bad,
    }
}

/// Renders a certificate as plain text, one evidence item per block.
pub fn render_human(cert: &FormalityCertificate) -> String {
    let mut out = String::new();
    let subject = match &cert.subject {
        Subject::Single { n, k } => format!("k[t]/t^{} with deg t = {k}", n + 1),
        Subject::PnConfig { n, k, h } => format!("configuration of P^{n}[{k}]-objects, edge degree {h}"),
        Subject::Spherical { k, h_min, h_max } => format!("configuration of {k}-spherelike objects, edge degrees in [{h_min}, {h_max}]"),
    };
    out.push_str(&format!("subject: {subject}\nverdict: {}\n", cert.verdict));
    if cert.experimental {
        out.push_str("experimental: yes\n");
    }
    for f in &cert.failed_hypotheses {
        out.push_str(&format!("failed hypothesis: {f}\n"));
    }
    for r in &cert.remarks {
        out.push_str(&format!("remark: {r}\n"));
    }
    for e in &cert.evidence {
        let status = if e.holds { "holds" } else { "FAILS" };
        out.push_str(&format!("\n[{:?}] {} ({status})\n", e.method, e.q_range));
        if !e.chain.is_empty() {
            let mut line = String::new();
            for (i, t) in e.chain.iter().enumerate() {
                if i > 0 {
                    line.push_str(&format!(" {} ", e.links[i - 1].symbol()));
                }
                line.push_str(&format!("{} [{}]", t.label, t.value));
            }
            out.push_str(&format!("  for p ≥ {}: {line}\n", e.p_min.unwrap_or(0)));
            for inst in &e.instances {
                let mut vals = String::new();
                for (i, v) in inst.values.iter().enumerate() {
                    if i > 0 {
                        vals.push_str(&format!(" {} ", e.links[i - 1].symbol()));
                    }
                    vals.push_str(&v.to_string());
                }
                out.push_str(&format!("  p = {}, q = {}: {vals}\n", inst.p, inst.q));
            }
        }
        if let Some(g) = &e.gcd {
            out.push_str(&format!(
                "  A lives in degrees divisible by gcd{:?} = {}, so no degree-0 map A^(q+2) -> A(2-q) unless {} | q-2\n",
                g.degrees, g.gcd, g.gcd
            ));
        }
        if let Some(d) = &e.direct {
            out.push_str(&format!("  dim HH^({},{}) = {}\n", d.q, d.internal_degree, d.dim));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_always_certifies() {
        for n in 1..=6 {
            for k in 1..=6 {
                let c = certify_single(n, k).unwrap();
                assert_eq!(c.verdict, Verdict::CertifiedFormal, "n={n} k={k}");
                assert!(recheck(&c).ok, "{:?}", recheck(&c));
            }
        }
        let c = certify_single(0, 2).unwrap();
        assert_eq!(c.verdict, Verdict::CriterionInapplicable);
        assert!(recheck(&c).ok);
    }

    #[test]
    fn single_instance_values() {
        let c = certify_single(2, 2).unwrap();
        let even = &c.evidence[0];
        // q = 4: nk + q - 2 = 6 < 12 = 2(n+1)k, i.e. 2 - 4 + 12 = 10 > nk = 4.
        assert_eq!(even.instances[0].values, vec![6, 12]);
    }

    #[test]
    fn pn_examples() {
        let c = certify_config_pn(2, 2, 2).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedFormal);
        let odd = c.evidence.iter().find(|e| e.q_range.parity == Some(Parity::Odd)).unwrap();
        assert_eq!(odd.instances[0].values, vec![7, 7, 8, 10, 10]);
        let c = certify_config_pn(3, 2, 3).unwrap();
        assert_eq!(c.verdict, Verdict::CriterionInapplicable);
        assert!(c.failed_hypotheses.iter().any(|f| f.contains("gcd")));
        assert!(recheck(&c).ok);
    }

    #[test]
    fn spherical_examples() {
        for k in [4, 6, 7, 8] {
            let c = certify_config_spherical(k, k / 2, k).unwrap();
            assert_eq!(c.verdict, Verdict::CertifiedFormal, "k={k}");
            assert!(recheck(&c).ok);
        }
        // k = 5, h = 2: maxdeg(A) + 1 = 6 is not below 2h + h = 6 at q = 3.
        let c = certify_config_spherical(5, 2, 5).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(recheck(&c).ok);
        assert_eq!(certify_config_spherical(5, 3, 5).unwrap().verdict, Verdict::CertifiedFormal);
        let c = certify_config_spherical(3, 1, 3).unwrap();
        assert_eq!(c.verdict, Verdict::CriterionInapplicable);
        assert!(!c.remarks.is_empty());
    }

    #[test]
    fn cy_normalization() {
        assert_eq!(cy_normalize(2, 2).unwrap(), CyNormalization { h: 2, gcd_ok: true });
        assert_eq!(cy_normalize(3, 4).unwrap(), CyNormalization { h: 6, gcd_ok: true });
        assert_eq!(cy_normalize(3, 2).unwrap(), CyNormalization { h: 3, gcd_ok: false });
        assert!(cy_normalize(3, 3).is_err());
    }

    #[test]
    fn tampering_is_detected() {
        let mut c = certify_config_pn(2, 2, 2).unwrap();
        c.evidence[1].chain[2].value.intercept -= 10;
        assert!(!recheck(&c).ok);

        let mut c = certify_config_spherical(5, 2, 5).unwrap();
        c.verdict = Verdict::CertifiedFormal;
        assert!(!recheck(&c).ok);

        let mut c = certify_config_pn(2, 2, 2).unwrap();
        c.evidence.remove(0);
        assert!(!recheck(&c).ok);
        assert_eq!(recheck(&c).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn mirrored_mode() {
        let c = certify_config_pn(2, -2, -2).unwrap();
        assert!(c.experimental);
        assert_eq!(c.verdict, Verdict::CertifiedFormal);
        assert!(recheck(&c).ok, "{:?}", recheck(&c));
    }

    #[test]
    fn affine_display() {
        assert_eq!(Affine::new(2, -2).to_string(), "2p-2");
        assert_eq!(Affine::new(0, 5).to_string(), "5");
        assert_eq!(Affine::new(1, 3).to_string(), "p+3");
    }
}
