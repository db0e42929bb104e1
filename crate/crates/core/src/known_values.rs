//! Published reference values for the counting classes, indexed from
//! `n = 1`. Used as ground truth by tests and by `verify`.

use crate::class::ClassId;

/// Values of the fourteen `F`/`Phi` classes, `n = 1, 2, ...`, as far as
/// they are tabulated.
pub fn table_one() -> Vec<(ClassId, &'static [u64])> {
    vec![
        (ClassId::f(0, 0, 0, 0), &[1, 1, 2, 4, 7, 16]),
        (ClassId::f(0, 0, 1, 0), &[1, 1, 3, 11, 40, 174]),
        (ClassId::f(1, 0, 1, 0), &[1, 2, 10, 72, 624, 6522]),
        (ClassId::f(0, 0, 0, 1), &[1, 2, 4, 9, 18, 44]),
        (
            ClassId::f(0, 0, 1, 1),
            &[1, 2, 7, 28, 134, 729, 4408, 29256, 210710],
        ),
        (ClassId::f(1, 0, 0, 1), &[1, 2, 6, 20, 73, 315]),
        (ClassId::f(1, 0, 1, 1), &[1, 3, 17, 129, 1227, 14123]),
        (
            ClassId::f(0, 1, 0, 1),
            &[1, 3, 6, 16, 34, 90, 211, 558, 1430],
        ),
        (
            ClassId::f(0, 1, 1, 1),
            &[1, 3, 10, 41, 192, 1025, 6087, 39754, 282241],
        ),
        (
            ClassId::F1111,
            &[1, 4, 24, 196, 2016, 24976, 361792, 5997872, 111969552],
        ),
        (ClassId::phi(0, 0), &[1, 1, 2, 3, 5, 11]),
        (ClassId::phi(1, 0), &[1, 2, 8, 44, 340, 3368]),
        (ClassId::phi(0, 1), &[1, 2, 4, 10, 20, 50]),
        (
            ClassId::PHI11,
            &[1, 3, 15, 108, 1045, 12639, 181553, 3001997, 55999767],
        ),
    ]
}

/// Values of the four symmetric classes `S_ij`, `n = 1, 2, ...`.
pub fn table_two() -> Vec<(ClassId, &'static [u64])> {
    vec![
        (ClassId::s(0, 0), &[1, 1, 2, 2, 3, 6]),
        (ClassId::s(0, 1), &[1, 1, 2, 4, 6, 10]),
        (ClassId::s(1, 0), &[1, 2, 6, 16, 56, 214, 866, 3796, 17468]),
        (
            ClassId::S11,
            &[1, 2, 6, 20, 74, 302, 1314, 6122, 29982, 154718],
        ),
    ]
}

/// `F_1111(10)`.
pub const F1111_AT_10: u64 = 2_324_081_728;

/// Looks up a published value, if tabulated.
pub fn published(class: ClassId, n: u32) -> Option<u64> {
    table_one()
        .into_iter()
        .chain(table_two())
        .find(|(c, _)| *c == class)
        .and_then(|(_, vals)| {
            if class == ClassId::F1111 && n == 10 {
                Some(F1111_AT_10)
            } else {
                vals.get((n as usize).checked_sub(1)?).copied()
            }
        })
}
