#![allow(dead_code)]

use sbint::sintegrand::IntegralParams;
use sbint::specfun::HalfOddOrder;

/// One reference case: parameters, expected value, and per transform
/// (points, largest index, number of M values).
pub struct Row {
    pub s: f64,
    pub twice_nu: i32,
    pub n_gamma: i32,
    pub n_x: u32,
    pub lam: u32,
    pub r1: f64,
    pub zeta1: f64,
    pub r2: f64,
    pub zeta2: f64,
    pub value: f64,
    pub phi1: (usize, i64, u32),
    pub phi2: (usize, i64, u32),
}

impl Row {
    pub fn params(&self) -> IntegralParams {
        IntegralParams::new(
            self.s,
            HalfOddOrder::new(self.twice_nu).unwrap(),
            self.n_gamma,
            self.n_x,
            self.lam,
            self.r1,
            self.zeta1,
            self.r2,
            self.zeta2,
        )
        .unwrap()
    }
}

macro_rules! row {
    ($s:expr, $nu:expr, $ng:expr, $nx:expr, $l:expr, $r1:expr, $z1:expr, $r2:expr, $z2:expr, $val:expr, $p1:expr, $p2:expr) => {
        Row {
            s: $s,
            twice_nu: $nu,
            n_gamma: $ng,
            n_x: $nx,
            lam: $l,
            r1: $r1,
            zeta1: $z1,
            r2: $r2,
            zeta2: $z2,
            value: $val,
            phi1: $p1,
            phi2: $p2,
        }
    };
}

pub const TABLE1: [Row; 10] = [
    row!(0.99, 5, 1, 0, 0, 24.00, 1.5, 2.0, 1.0, 0.113874170637205, (142, 45, 2), (93, 34, 2)),
    row!(0.01, 5, 5, 0, 0, 6.31, 1.0, 2.0, 1.0, 0.638243453884443, (138, 41, 2), (97, 33, 2)),
    row!(0.99, 5, 5, 0, 0, 4.50, 2.0, 1.5, 1.0, 0.701581269512308, (139, 42, 2), (97, 33, 2)),
    row!(0.99, 5, 5, 1, 0, 3.00, 1.5, 3.5, 2.0, 0.242778918544382e-3, (78, 41, 2), (78, 37, 4)),
    row!(0.99, 9, 9, 1, 1, 6.00, 2.0, 3.5, 1.0, 1.83138910224195, (139, 42, 2), (97, 33, 2)),
    row!(0.01, 9, 9, 2, 1, 8.50, 2.0, 3.5, 2.0, 0.248336723989982e-3, (81, 44, 2), (72, 35, 4)),
    row!(0.01, 7, 3, 2, 1, 3.00, 2.0, 5.0, 1.0, 0.285091100421789e-2, (85, 41, 3), (81, 37, 3)),
    row!(0.99, 7, 5, 2, 2, 4.00, 2.5, 5.5, 1.0, 0.112567767257153, (139, 42, 2), (92, 33, 2)),
    row!(0.01, 9, 7, 2, 2, 9.00, 2.0, 3.5, 1.0, 0.183269571025263e-2, (141, 44, 2), (97, 33, 2)),
    row!(0.01, 13, 9, 3, 2, 4.00, 2.5, 5.5, 1.0, 0.167566737865368e-1, (91, 37, 3), (92, 36, 3)),
];

/// Larger frequencies and orders. `value` is an independent
/// high-precision evaluation.
pub const TABLE2: [Row; 11] = [
    row!(0.99, 9, 9, 2, 1, 35.0, 2.5, 3.5, 0.5, 0.73782998245511245, (82, 45, 2), (84, 41, 4)),
    row!(0.01, 9, 3, 2, 2, 45.0, 1.5, 2.0, 1.0, 0.0010385118876646922, (142, 45, 2), (93, 34, 2)),
    row!(0.99, 13, 5, 3, 3, 50.0, 1.5, 2.0, 1.0, 0.03176483106028245, (141, 44, 2), (93, 34, 2)),
    row!(0.01, 15, 6, 4, 3, 55.0, 1.5, 2.0, 1.0, 0.00098926110106036635, (83, 46, 2), (86, 42, 4)),
    row!(0.99, 15, 6, 4, 4, 55.0, 1.5, 2.0, 1.0, 0.036655189749968798, (141, 44, 2), (93, 34, 2)),
    row!(0.01, 17, 9, 5, 4, 55.0, 1.5, 2.0, 1.0, 0.00069801862612222042, (83, 46, 2), (82, 40, 4)),
    row!(0.99, 23, 21, 6, 5, 55.0, 1.5, 2.0, 1.5, 0.0056402292168857615, (81, 44, 2), (84, 41, 4)),
    row!(0.01, 27, 29, 6, 6, 60.0, 1.5, 2.0, 1.0, 0.4141311812487011, (142, 45, 2), (93, 34, 2)),
    row!(0.01, 29, 25, 7, 6, 55.0, 2.0, 3.0, 2.0, 0.0028495275072895104, (82, 45, 2), (82, 40, 4)),
    row!(0.01, 31, 23, 7, 7, 55.0, 2.5, 2.0, 1.0, 0.010709761540985472, (143, 45, 2), (93, 34, 2)),
    row!(0.01, 33, 33, 7, 7, 65.0, 2.0, 2.0, 1.0, 0.016742197071281122, (143, 45, 2), (93, 34, 2)),
];
