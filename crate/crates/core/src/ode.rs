//! Dormand–Prince 8(5,3) with step-size control and event location.
//!
//! Only what the shooting solvers need: integrate a small autonomous system
//! until a scalar event function crosses zero upward, until a cap, or until
//! the state blows up. Event times are located by re-stepping from the start
//! of the bracketing step with the Illinois variant of regula falsi, so the
//! located state carries full eighth-order accuracy.

use crate::error::{NdsgError, Result};

/// Error-control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed step; `None` means unrestricted.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, max_step: None, max_steps: 2_000_000 }
    }
}

/// How an integration ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Stop<const N: usize> {
    /// The event function crossed zero upward at `x`.
    Event { x: f64, y: [f64; N] },
    /// Reached the independent-variable cap without an event.
    Cap { x: f64, y: [f64; N] },
}

const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

#[inline]
fn comb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        *o += h * s;
    }
    out
}

/// One DOP853 step. Returns the new state and the scaled error norm
/// (accept when `<= 1`).
pub fn dop853_step<const N: usize, F>(f: &F, x: f64, y: &[f64; N], k1: &[f64; N], h: f64, tol: &Tolerances) -> ([f64; N], f64)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k2 = f(x + C2 * h, &comb(y, h, &[(A21, k1)]));
    let k3 = f(x + C3 * h, &comb(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(x + C4 * h, &comb(y, h, &[(A41, k1), (A43, &k3)]));
    let k5 = f(x + C5 * h, &comb(y, h, &[(A51, k1), (A53, &k3), (A54, &k4)]));
    let k6 = f(x + C6 * h, &comb(y, h, &[(A61, k1), (A64, &k4), (A65, &k5)]));
    let k7 = f(x + C7 * h, &comb(y, h, &[(A71, k1), (A74, &k4), (A75, &k5), (A76, &k6)]));
    let k8 = f(x + C8 * h, &comb(y, h, &[(A81, k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]));
    let k9 = f(
        x + C9 * h,
        &comb(y, h, &[(A91, k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)]),
    );
    let k10 = f(
        x + C10 * h,
        &comb(y, h, &[(A101, k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)]),
    );
    let k11 = f(
        x + C11 * h,
        &comb(
            y,
            h,
            &[(A111, k1), (A114, &k4), (A115, &k5), (A116, &k6), (A117, &k7), (A118, &k8), (A119, &k9), (A1110, &k10)],
        ),
    );
    let k12 = f(
        x + h,
        &comb(
            y,
            h,
            &[
                (A121, k1),
                (A124, &k4),
                (A125, &k5),
                (A126, &k6),
                (A127, &k7),
                (A128, &k8),
                (A129, &k9),
                (A1210, &k10),
                (A1211, &k11),
            ],
        ),
    );

    let mut y_new = [0.0; N];
    let mut err5 = 0.0;
    let mut err3 = 0.0;
    for i in 0..N {
        let incr = B1 * k1[i] + B6 * k6[i] + B7 * k7[i] + B8 * k8[i] + B9 * k9[i] + B10 * k10[i] + B11 * k11[i] + B12 * k12[i];
        y_new[i] = y[i] + h * incr;
        let sk = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
        let e3 = incr - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
        let e5 = ER1 * k1[i] + ER6 * k6[i] + ER7 * k7[i] + ER8 * k8[i] + ER9 * k9[i] + ER10 * k10[i] + ER11 * k11[i] + ER12 * k12[i];
        err3 += (e3 / sk) * (e3 / sk);
        err5 += (e5 / sk) * (e5 / sk);
    }
    let mut deno = err5 + 0.01 * err3;
    if deno <= 0.0 {
        deno = 1.0;
    }
    let err = h.abs() * err5 * (1.0 / (N as f64 * deno)).sqrt();
    (y_new, err)
}

/// Integrate `y' = f(x, y)` from `x0` towards `x_cap > x0`, stopping at the
/// first upward zero crossing of `event(y)`, or when `|y|_inf > guard`.
///
/// `on_step` sees every accepted step `(x, y)`, including the initial point.
pub fn integrate<const N: usize, F, E, S>(
    f: F,
    x0: f64,
    y0: [f64; N],
    x_cap: f64,
    tol: &Tolerances,
    event: E,
    guard: f64,
    mut on_step: S,
) -> Result<Stop<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    E: Fn(&[f64; N]) -> f64,
    S: FnMut(f64, &[f64; N]),
{
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let mut g = event(&y);
    on_step(x, &y);
    let span = x_cap - x0;
    let max_step = tol.max_step.unwrap_or(span).min(span);
    let mut h = initial_step(&f, x, &y, &k1, tol).min(max_step);
    let mut steps = 0usize;

    while x < x_cap {
        steps += 1;
        if steps > tol.max_steps {
            return Err(NdsgError::StepUnderflow { xi: x });
        }
        let last = x + h >= x_cap;
        if last {
            h = x_cap - x;
        }
        let (y_new, err) = dop853_step(&f, x, &y, &k1, h, tol);
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
            if h < 1e-14 * x.abs().max(1.0) {
                return Err(NdsgError::BlowUp { xi: x });
            }
            continue;
        }
        if err > 1.0 {
            h *= (0.9 * err.powf(-1.0 / 8.0)).max(0.2);
            if h < 1e-14 * x.abs().max(1.0) {
                return Err(NdsgError::StepUnderflow { xi: x });
            }
            continue;
        }
        let g_new = event(&y_new);
        if g < 0.0 && g_new >= 0.0 {
            let (xe, ye) = locate_event(&f, x, &y, &k1, h, g, g_new, tol, &event);
            on_step(xe, &ye);
            return Ok(Stop::Event { x: xe, y: ye });
        }
        x = if last { x_cap } else { x + h };
        y = y_new;
        g = g_new;
        k1 = f(x, &y);
        on_step(x, &y);
        if y.iter().any(|v| v.abs() > guard) {
            return Err(NdsgError::BlowUp { xi: x });
        }
        let fac = (0.9 * err.max(1e-30).powf(-1.0 / 8.0)).clamp(0.333, 6.0);
        h = (h * fac).min(max_step);
    }
    Ok(Stop::Cap { x, y })
}

/// Integrate from `x0` and return the state at each of the increasing
/// abscissae `xs` (all `>= x0`). Steps are clamped so every output point is
/// hit exactly rather than interpolated.
pub fn sample_at<const N: usize, F>(f: F, x0: f64, y0: [f64; N], xs: &[f64], tol: &Tolerances) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(xs.len());
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let mut h = initial_step(&f, x, &y, &k1, tol);
    let mut steps = 0usize;
    for &target in xs {
        while x < target {
            steps += 1;
            if steps > tol.max_steps {
                return Err(NdsgError::StepUnderflow { xi: x });
            }
            let hit = x + h >= target;
            let hs = if hit { target - x } else { h };
            let (y_new, err) = dop853_step(&f, x, &y, &k1, hs, tol);
            if !err.is_finite() || err > 1.0 {
                let fac = if err.is_finite() { (0.9 * err.powf(-1.0 / 8.0)).max(0.2) } else { 0.25 };
                h = hs * fac;
                if h < 1e-14 * x.abs().max(1.0) {
                    return Err(NdsgError::StepUnderflow { xi: x });
                }
                continue;
            }
            x = if hit { target } else { x + hs };
            y = y_new;
            k1 = f(x, &y);
            if !hit {
                h = (hs * (0.9 * err.max(1e-30).powf(-1.0 / 8.0)).clamp(0.333, 6.0)).max(h.min(hs));
            }
        }
        out.push(y);
    }
    Ok(out)
}

fn initial_step<const N: usize, F>(f: &F, x: f64, y: &[f64; N], k1: &[f64; N], tol: &Tolerances) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let sk = |i: usize| tol.atol + tol.rtol * y[i].abs();
    let dnf: f64 = (0..N).map(|i| (k1[i] / sk(i)).powi(2)).sum();
    let dny: f64 = (0..N).map(|i| (y[i] / sk(i)).powi(2)).sum();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * (dny / dnf).sqrt() };
    let y1 = comb(y, h, &[(1.0, k1)]);
    let k2 = f(x + h, &y1);
    let der2 = ((0..N).map(|i| ((k2[i] - k1[i]) / sk(i)).powi(2)).sum::<f64>()).sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(1.0 / 8.0) };
    h = (100.0 * h).min(h1);
    h
}

#[allow(clippy::too_many_arguments)]
fn locate_event<const N: usize, F, E>(
    f: &F,
    x: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    g0: f64,
    g1: f64,
    tol: &Tolerances,
    event: &E,
) -> (f64, [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    E: Fn(&[f64; N]) -> f64,
{
    // Illinois regula falsi on the step length s in (0, h].
    let (mut a, mut ga) = (0.0, g0);
    let (mut b, mut gb) = (h, g1);
    let mut best = dop853_step(f, x, y, k1, h, tol).0;
    let mut side = 0i8;
    for _ in 0..100 {
        if gb == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * (x + b).abs().max(1.0) {
            break;
        }
        let s = (a * gb - b * ga) / (gb - ga);
        let s = if s > a && s < b { s } else { 0.5 * (a + b) };
        let ys = dop853_step(f, x, y, k1, s, tol).0;
        let gs = event(&ys);
        if gs >= 0.0 {
            b = s;
            gb = gs;
            best = ys;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        } else {
            a = s;
            ga = gs;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        }
        if gs.abs() < 1e-15 {
            if gs >= 0.0 {
                break;
            }
            return (x + s, ys);
        }
    }
    (x + b, best)
}
