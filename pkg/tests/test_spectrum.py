import math

import numpy as np
import pytest

from cavityblockade import params as P
from cavityblockade import spectrum


def make_eff(delta_c, delta_e, G, J, kappa=1.0):
    return P.EffectiveParams(
        delta_e=delta_e,
        G=G,
        J=J,
        theta=0.0,
        omega=0.0,
        M=complex(delta_c - G, -0.5 * kappa),
        N=complex(delta_c + delta_e, -0.5 * kappa),
    )


def oracle_pair(delta_c, delta_e, G, J, n):
    """Diagonalize the two-state block |n,g>, |n-1,e> directly."""
    h = np.array(
        [
            [n * (delta_c - G), math.sqrt(n) * J],
            [math.sqrt(n) * J, (n - 1) * delta_c + delta_e],
        ]
    )
    lo, hi = np.linalg.eigvalsh(h)
    return hi, lo


class TestEigenenergies:
    def test_decoupled_limit(self):
        pair = spectrum.eigenenergies(make_eff(0.3, -0.5, 0.0, 0.0), 1)
        assert pair.eps_plus == pytest.approx(0.3, abs=1e-14)
        assert pair.eps_minus == pytest.approx(-0.5, abs=1e-14)

    def test_resonant_splitting(self):
        # Degenerate diagonal: splitting must be exactly 2 sqrt(n) |J|.
        eff = make_eff(0.0, 0.0, 0.0, 0.8)
        pair = spectrum.eigenenergies(eff, 1)
        assert pair.splitting == pytest.approx(1.6, rel=1e-14)
        pair2 = spectrum.eigenenergies(eff, 2)
        assert pair2.splitting == pytest.approx(2 * math.sqrt(2) * 0.8, rel=1e-14)

    def test_two_photon_block_example(self):
        pair = spectrum.eigenenergies(make_eff(1.0, -0.5, 1.0, 2.0), 2)
        hi, lo = oracle_pair(1.0, -0.5, 1.0, 2.0, 2)
        assert pair.eps_plus == pytest.approx(hi, rel=1e-14)
        assert pair.eps_minus == pytest.approx(lo, rel=1e-14)

    def test_random_blocks_against_diagonalization(self):
        rng = np.random.default_rng(20260813)
        for _ in range(300):
            dc, de, G, J = rng.uniform(-5.0, 5.0, size=4)
            n = int(rng.integers(1, 5))
            pair = spectrum.eigenenergies(make_eff(dc, de, G, J), n)
            hi, lo = oracle_pair(dc, de, G, J, n)
            scale = max(abs(hi), abs(lo), 1.0)
            assert abs(pair.eps_plus - hi) <= 1e-12 * scale
            assert abs(pair.eps_minus - lo) <= 1e-12 * scale

    def test_trace_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            dc, de, G, J = rng.uniform(-4.0, 4.0, size=4)
            n = int(rng.integers(1, 5))
            pair = spectrum.eigenenergies(make_eff(dc, de, G, J), n)
            trace = n * (dc - G) + (n - 1) * dc + de
            assert pair.eps_plus + pair.eps_minus == pytest.approx(
                trace, abs=1e-12 * max(1.0, abs(trace))
            )

    def test_splitting_lower_bound(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            dc, de, G, J = rng.uniform(-4.0, 4.0, size=4)
            n = int(rng.integers(1, 5))
            pair = spectrum.eigenenergies(make_eff(dc, de, G, J), n)
            assert pair.splitting >= 2.0 * math.sqrt(n) * abs(J) - 1e-12

    def test_fractional_photon_number_rejected(self):
        with pytest.raises(ValueError):
            spectrum.eigenenergies(make_eff(0.0, 0.0, 0.0, 1.0), 0)


class TestAnharmonicity:
    def test_harmonic_when_uncoupled(self):
        # With J = G = 0 and delta_e above delta_c the lower branch is the
        # bare cavity ladder, which is exactly harmonic.
        eff = make_eff(0.4, 2.0, 0.0, 0.0)
        assert spectrum.anharmonicity(eff) == pytest.approx(0.0, abs=1e-14)

    def test_uncoupled_branch_bookkeeping(self):
        # delta_e below the one-photon cavity energy: the lower eigenvalue of
        # block n is delta_e once (n-1) delta_c + delta_e < n delta_c.
        eff = make_eff(0.4, -2.0, 0.0, 0.0)
        expected = (0.4 * 1 + -2.0) - 2.0 * (-2.0)
        assert spectrum.anharmonicity(eff) == pytest.approx(expected, abs=1e-14)

    @pytest.mark.filterwarnings(
        "ignore::cavityblockade.params.RegimeWarning"
    )
    def test_nonzero_at_blockade_point(self):
        import dataclasses

        from cavityblockade import optimizer

        base = P.reference_params()
        point = optimizer.solve_optimal(base)
        working = dataclasses.replace(base, delta_c=point.delta_c_opt)
        eff = P.derive_effective(working, j=point.J, theta=point.theta)
        assert abs(spectrum.anharmonicity(eff)) > 0.1

    def test_matches_pairwise_definition(self):
        eff = make_eff(1.2, -0.7, 0.3, 1.1)
        one = spectrum.eigenenergies(eff, 1)
        two = spectrum.eigenenergies(eff, 2)
        assert spectrum.anharmonicity(eff) == pytest.approx(
            two.eps_minus - 2.0 * one.eps_minus, rel=1e-13
        )
