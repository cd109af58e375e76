import math

import numpy as np
import pytest

from powermix import Dataset, Flag, Sample, fit_p_global, per_sample_p, power_mean, solve_p_single
from powermix.errors import AllDegenerate, DataFormatError, Degenerate, EmptyDataset, Unsolvable
from powermix.fitting import rss

from conftest import synth_samples


class TestSolveSingle:
    @pytest.mark.parametrize("measured, p", [(2.5, 1.0), (2.0, 0.0), (1.6, -1.0)])
    def test_examples(self, measured, p):
        s = Sample((0.5, 0.5), (1, 4), measured)
        # oracle: the forward law at the expected exponent reproduces the measurement
        assert power_mean(p, s.comp, s.vals).value == pytest.approx(measured, rel=1e-15)
        got = solve_p_single(s)
        assert got == pytest.approx(p, abs=1e-10)
        assert abs(power_mean(got, s.comp, s.vals).value - measured) <= 1e-12 * measured

    def test_geometric_exact_zero(self):
        assert solve_p_single(Sample((0.5, 0.5), (1, 4), 2.0)) == 0.0

    def test_degenerate(self):
        with pytest.raises(Degenerate):
            solve_p_single(Sample((0.5, 0.5), (3, 3), 3))

    def test_unsolvable_hints(self):
        with pytest.raises(Unsolvable) as hi:
            solve_p_single(Sample((0.5, 0.5), (1, 4), 4))
        assert hi.value.hint == math.inf
        with pytest.raises(Unsolvable) as lo:
            solve_p_single(Sample((0.5, 0.5), (1, 4), 0.5))
        assert lo.value.hint == -math.inf

    def test_cap(self):
        p, flags = solve_p_single(Sample((0.5, 0.5), (1, 4), 3.9999), full_output=True)
        assert p == 64.0 and Flag.MaxExponent in flags
        p, flags = solve_p_single(Sample((0.5, 0.5), (1, 4), 2.5), full_output=True)
        assert not flags

    def test_bracket_expansion(self):
        s = Sample((0.5, 0.5), (1, 4), power_mean(7.5, (0.5, 0.5), (1, 4)).value)
        assert solve_p_single(s, bracket=(-1, 1)) == pytest.approx(7.5, abs=1e-10)

    def test_scale_invariant(self, rng):
        for s in synth_samples(rng, 1.7, 10):
            p0 = solve_p_single(s)
            for t in (1e-6, 1e6):
                st = Sample(s.comp, [t * v for v in s.vals], t * s.measured)
                assert abs(solve_p_single(st) - p0) <= 1e-9

    def test_recovers_exact(self, rng):
        for p_star in (-3.0, -0.4, 0.9, 5.0):
            for s in synth_samples(rng, p_star, 10):
                assert solve_p_single(s) == pytest.approx(p_star, abs=1e-10)


class TestGlobalFit:
    def test_exact_half(self, rng):
        data = synth_samples(rng, 0.5, 20)
        r = fit_p_global(data)
        assert abs(r.p_hat - 0.5) <= 1e-8
        assert r.rss <= 1e-16

    def test_single_sample(self):
        r = fit_p_global([Sample((0.5, 0.5), (1, 4), 2.5)])
        assert r.p_hat == pytest.approx(1.0, abs=1e-8)
        assert r.rss == pytest.approx(0.0, abs=1e-20)

    def test_beats_grid(self, rng):
        data = synth_samples(rng, 1.3, 50, noise=0.05)
        r = fit_p_global(data)
        grid = np.linspace(-64, 64, 81)
        assert all(r.rss <= rss(p, data) for p in grid)

    def test_noisy_seeded(self):
        # tolerance from scripts/calibrate_noise.py (seed 20261019): worst of 200 trials 0.0122
        data = synth_samples(np.random.default_rng(7), 2.0, 200, noise=0.01)
        assert abs(fit_p_global(data).p_hat - 2.0) <= 0.1

    def test_errors(self):
        with pytest.raises(EmptyDataset):
            fit_p_global([])
        with pytest.raises(AllDegenerate):
            fit_p_global([Sample((0.5, 0.5), (3, 3), 3)])

    def test_degenerate_samples_tolerated(self, rng):
        data = synth_samples(rng, -1.0, 5) + [Sample((0.5, 0.5), (3, 3), 3)]
        assert fit_p_global(data).p_hat == pytest.approx(-1.0, abs=1e-8)


class TestPerSample:
    def test_exact(self):
        data = [Sample((0.5, 0.5), (1, 4), 2.5), Sample((0.2, 0.8), (2, 9), power_mean(1, (0.2, 0.8), (2, 9)).value)]
        out = per_sample_p(data)
        assert [i for i, _ in out] == [0, 1]
        assert all(v == pytest.approx(1.0, abs=1e-10) for _, v in out)

    def test_statuses(self):
        data = [
            Sample((0.5, 0.5), (1, 4), 2.5),
            Sample((0.5, 0.5), (3, 3), 3),
            Sample((0.5, 0.5), (1, 4), 4),
        ]
        out = per_sample_p(data)
        assert isinstance(out[0][1], float)
        assert isinstance(out[1][1], Degenerate)
        assert isinstance(out[2][1], Unsolvable) and out[2][1].hint == math.inf

    def test_empty(self):
        with pytest.raises(EmptyDataset):
            per_sample_p([])


class TestCsv:
    def test_round_trip(self, tmp_path):
        data = Dataset([Sample((0.5, 0.5), (1, 4), 2.5), Sample((0.3, 0.7), (2, 5), 3.1)])
        path = tmp_path / "d.csv"
        data.to_csv(path)
        text = path.read_bytes()
        assert text.endswith(b"\n") and b"\r" not in text
        back = Dataset.from_csv(path)
        assert back.samples == data.samples

    def test_comments_and_blank(self):
        lines = ["# comment\n", "a1,a2,s1,s2,measured\n", "\n", "0.5,0.5,1,4,2.5\n"]
        assert len(Dataset.from_lines(lines)) == 1

    @pytest.mark.parametrize(
        "lines, line_no",
        [
            (["a1,s1,measured\n", "1,x,3\n"], 2),
            (["a1,a2,s1,s2,measured\n", "0.5,0.5,1,4\n"], 2),
            (["a1,b2,s1,s2,measured\n"], 1),
            (["a1,a2,s1,s2,measured\n", "0.5,0.6,1,4,2\n"], 2),
        ],
    )
    def test_bad(self, lines, line_no):
        with pytest.raises(DataFormatError) as e:
            Dataset.from_lines(lines)
        assert e.value.line == line_no
