//! Oracles independent of the library: a plain double-precision power series
//! for Ai and Ai', and tables computed with mpmath at 40 digits.

#![allow(dead_code)]

use num_complex::Complex64;

const AI0: f64 = 0.355_028_053_887_817_2;
const NEG_AIP0: f64 = 0.258_819_403_792_806_8;

/// `Ai(z)`, `Ai'(z)` by direct summation of the Maclaurin series. Loses about
/// `(2/3)|z|^{3/2} / ln 10` digits where Ai is small; use only for `|z| <~ 6`
/// or where Ai is large.
pub fn series_ai(z: Complex64) -> (Complex64, Complex64) {
    let z3 = z * z * z;
    let (mut f, mut g) = (Complex64::new(1.0, 0.0), z);
    let (mut fp, mut gp) = (z * z / 2.0, Complex64::new(1.0, 0.0));
    let (mut sf, mut sg, mut sfp, mut sgp) = (f, g, fp, gp);
    for k in 0..300 {
        let k3 = 3.0 * k as f64;
        f = f * z3 / ((k3 + 2.0) * (k3 + 3.0));
        g = g * z3 / ((k3 + 3.0) * (k3 + 4.0));
        fp = fp * z3 / ((k3 + 3.0) * (k3 + 5.0));
        gp = gp * z3 / ((k3 + 1.0) * (k3 + 3.0));
        sf += f;
        sg += g;
        sfp += fp;
        sgp += gp;
    }
    (AI0 * sf - NEG_AIP0 * sg, AI0 * sfp - NEG_AIP0 * sgp)
}

/// `(re z, im z, Ai, Ai')` from mpmath.
pub const AI_TABLE: &[(f64, f64, [f64; 4])] = &[
    (0.0, 0.0, [0.3550280538878172, 0.0, -0.2588194037928068, 0.0]),
    (1.0, 0.0, [0.13529241631288141, 0.0, -0.1591474412967932, 0.0]),
    (0.0, 2.0, [-0.10961462643277392, -0.911583600113861, -0.6778858159258347, 1.0346546678889406]),
    (1.7, 0.0, [0.05432479273291947, 0.0, -0.07737488952532504, 0.0]),
    (2.0, 1.0, [0.0016977668572654568, -0.04071801705322398, -0.015110279283226958, 0.06245895471360014]),
    (-3.0, 0.5, [-0.5281723418823496, 0.18682298552967844, 0.49990997337087834, 0.6268792167466216]),
    (5.0, 0.0, [0.00010834442813607442, 0.0, -0.0002474138908684625, 0.0]),
    (8.5, 3.0, [-1.9876574160414057e-08, -1.2211995506178396e-08, 5.324769242393574e-08, 4.635291448879068e-08]),
    (-10.0, 0.0, [0.04024123848644319, 0.0, 0.99626504413279, 0.0]),
    (0.0, 12.0, [20659441.47950501, -44627666.75747433, -158985314.736904, 59155301.22464071]),
    (30.0, 0.0, [3.2082175915504954e-49, 0.0, -1.759876581432726e-48, 0.0]),
    (-25.0, 5.0, [8909346177.59474, -3069724811.1370378, -19765570521.263996, -43252246317.51882]),
    (50.0, 50.0, [-5.317901957074564e-68, -1.1635880037707098e-67, 3.912512705884705e-68, 1.0752632316562257e-66]),
    (-7.61086434769587, 5.685485368987587, [-654315.3083762897, -1302746.2792008298, -3168228.4703714, 3141440.5494863177]),
    (7.0, 7.0, [4.856086047031957e-05, -2.8319710001764468e-05, -0.00017564030285190498, 2.5206108786566736e-05]),
    (-6.5, -6.5, [4506651.159515847, -1086665.5081824954, -2116787.7944681253, 13775156.519278103]),
    (3.0, -8.8, [33.97683604045197, -16.262209308915935, -56.12235994263305, 99.90246097336231]),
    (12.990381056766578, -7.5, [-1.3274384538481761e-13, 1.2580110115760956e-13, 3.734300115680066e-13, -6.04412378345402e-13]),
    (0.3, -0.2, [0.2771025692758767, 0.049302117253468176, -0.2492305833505045, -0.017350467779168918]),
    (-1.5, 0.0, [0.4642565777488694, 0.0, 0.3091869672024104, 0.0]),
];

/// `(re z, im z, Bi, Bi')` from mpmath.
pub const BI_TABLE: &[(f64, f64, [f64; 4])] = &[
    (0.0, 0.0, [0.6149266274460007, 0.0, 0.4482883573538264, 0.0]),
    (1.0, 0.0, [1.2074235949528713, 0.0, 0.9324359333927756, 0.0]),
    (2.5, 0.0, [6.481660738460579, 0.0, 9.421423317334302, 0.0]),
    (5.0, 0.0, [657.7920441711711, 0.0, 1435.8190802179824, 0.0]),
    (0.0, 3.0, [0.7670240860458455, -2.3579493073479134, -3.7458534483987718, 2.080175516900382]),
    (1.0, -2.0, [0.0488220324530612, -0.13327405799174843, -0.8572392586053618, -0.49550633630956736]),
    (-4.0, 1.0, [1.4580011545176788, -0.3412741000409919, -0.9829525270582744, -2.7544015435341396]),
];

/// `(a, int_a^inf Ai)` from mpmath.
pub const TAIL_TABLE: &[(f64, f64)] = &[
    (0.0, 1.0 / 3.0),
    (0.5, 0.18738002842147616),
    (1.0, 0.09701599141622355),
    (2.0, 0.020800577552653642),
    (5.0, 4.5743027415453844e-05),
    (9.5, 1.6883637136052917e-10),
    (12.0, 3.953145915043153e-14),
];

/// `(x, F_{1/2}(x), f_{1/2}(x))` from mpmath quadrature of the same integrals.
pub const HALF_TABLE: &[(f64, f64, f64)] = &[
    (0.25, 0.2390457516584802, 0.9162239703193666),
    (0.5, 0.4513344555330411, 0.7733368291740763),
    (1.0, 0.7529241732513557, 0.43791054094949877),
    (1.5, 0.9060352753934473, 0.19621307209160577),
    (2.0, 0.9692099463017054, 0.0729684271636366),
];

/// `(x, phi(x))` from mpmath.
pub const PHI_TABLE: &[(f64, f64)] = &[
    (0.0, 1.2315393278768918),
    (1.0, 2.218042475476987),
    (-1.0, 0.10899715679643672),
    (-4.0, 1.7272286832390484e-05),
];

pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= abs.max(rel * b.abs())
}
