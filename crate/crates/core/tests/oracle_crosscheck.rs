use kitaev_core::entropy::{block_entropy_at, EntropyMethod};
use kitaev_core::oracle::{ed_ground, reduced_density, vn_entropy};
use kitaev_core::pairing::{closed_form_gamma, construction_discrepancy};
use kitaev_core::{
    block_entropy_curve, block_entropy_curve_with, compare_entropies, ChainParams, MajoranaCorrelation, PairingMatrix,
};

fn params(n: usize, jx: f64, jy: f64, h: f64) -> ChainParams {
    ChainParams::new(n, jx, jy, h).unwrap()
}

#[test]
fn curve_matches_exact_diagonalization() {
    for (jx, jy, h) in [(1.0, 1.0, 0.5), (1.0, 0.8, 1.0), (0.3, 1.0, 2.0), (1.0, 0.3, -0.7)] {
        let r = compare_entropies(&params(8, jx, jy, h), &[1, 2, 3, 4, 5, 6, 7]).unwrap();
        assert!(r.max_abs_diff() < 1e-8, "{jx} {jy} {h}: {r:?}");
        assert!(r.energy_mismatch.abs() < 1e-9);
    }
}

#[test]
fn complementary_blocks_have_equal_entropy() {
    for (n, jx, jy, h) in [(40, 1.0, 0.8, 0.0), (64, 1.0, 1.0, 0.5), (100, 0.3, 1.0, 1.7)] {
        let p = params(n, jx, jy, h);
        let lens: Vec<usize> = (1..n).collect();
        let curve = block_entropy_curve(&p, &lens).unwrap();
        for l in 1..n {
            assert!((curve[l - 1].1 - curve[n - l - 1].1).abs() < 1e-10, "N={n} L={l}");
        }
    }
}

#[test]
fn curve_rejects_bad_block_lengths() {
    let p = params(8, 1.0, 1.0, 0.5);
    assert!(block_entropy_curve(&p, &[0]).is_err());
    assert!(block_entropy_curve(&p, &[2, 8]).is_err());
}

#[test]
fn cross_block_route_misses_in_block_pairing() {
    // dropping the in-block exponents is not an equivalence: the cross-block
    // singular values miss the exact entropy by a visible margin
    let p = params(8, 1.0, 1.0, 0.5);
    let ground = ed_ground(&p).unwrap();
    let exact = vn_entropy(&reduced_density(&ground.state, 4).unwrap()).unwrap();
    let cross = block_entropy_at(&p, 4, EntropyMethod::CrossBlock).unwrap();
    let corr = block_entropy_at(&p, 4, EntropyMethod::Correlation).unwrap();
    assert!((corr - exact).abs() < 1e-8);
    assert!((cross - exact).abs() > 1e-3, "cross {cross} exact {exact}");
}

#[test]
fn cross_block_route_is_exact_without_in_block_pairing() {
    // a pairing matrix with only cross-block entries is already in Schmidt form
    let (n, l) = (8, 3);
    let mut g = kitaev_core::DenseMatrix::zeros(n, n);
    g[(0, 4)] = 0.9;
    g[(1, 6)] = -0.4;
    g[(2, 3)] = 1.3;
    let g = PairingMatrix::new(g).unwrap();
    let cross = kitaev_core::schmidt_numbers(&kitaev_core::block_coupling(&g, l).unwrap()).unwrap();
    let corr = MajoranaCorrelation::from_pairing(&g).unwrap().schmidt_spectrum(l).unwrap();
    let (e1, e2) = (kitaev_core::block_entropy(&cross), kitaev_core::block_entropy(&corr));
    assert!((e1 - e2).abs() < 1e-12, "{e1} {e2}");
}

#[test]
fn closed_form_agrees_only_for_equal_couplings() {
    assert!(construction_discrepancy(&params(16, 1.0, 1.0, 0.5)).unwrap() < 1e-13);
    assert!(construction_discrepancy(&params(16, 1.0, 0.3, 1.0)).unwrap() > 1e-3);

    // the flipped sign shows up in the entropy when the couplings differ
    let p = params(8, 1.0, 0.3, 1.0);
    let closed = closed_form_gamma(&p).unwrap().antisymmetrized();
    assert!(closed.matrix().as_slice().iter().all(|z| z.im.abs() < 1e-14));
    let real = PairingMatrix::new(closed.matrix().map(|z| z.re)).unwrap();
    let e_closed =
        kitaev_core::block_entropy(&MajoranaCorrelation::from_pairing(&real).unwrap().schmidt_spectrum(2).unwrap());
    let e_exact = block_entropy_curve_with(&p, &[2], EntropyMethod::Correlation).unwrap()[0].1;
    let ground = ed_ground(&p).unwrap();
    let e_ed = vn_entropy(&reduced_density(&ground.state, 2).unwrap()).unwrap();
    assert!((e_exact - e_ed).abs() < 1e-8);
    assert!((e_closed - e_ed).abs() > 1e-2);
}
