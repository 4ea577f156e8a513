import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharpreg.design import (
    Dataset,
    Interval,
    count_in,
    edge_quadratic_density,
    emp_inner_product,
    empirical_mass,
    generate_dataset,
    holder_check,
    read_dataset_csv,
    resolve_density,
    resolve_target,
    sample_design,
    table_density,
    target_labels,
    triangle,
    uniform_density,
    write_dataset_csv,
)
from sharpreg.exceptions import ConfigError, EmptyIntervalError


def edge_cdf(x):
    # closed form of int_0^x 0.05 + 11.4 (t - 1/2)^2 dt
    return 0.05 * x + 3.8 * ((x - 0.5) ** 3 + 0.125)


class TestDensities:
    def test_edge_normalised_and_floor(self, edge):
        assert edge_cdf(1.0) == pytest.approx(1.0, abs=1e-12)
        assert edge.lower_bound == pytest.approx(0.05)
        assert edge(0.5) == pytest.approx(0.05)
        assert edge(0.0) == pytest.approx(0.05 + 11.4 / 4)

    def test_edge_cdf_matches_closed_form(self, edge):
        x = np.linspace(0, 1, 1001)
        # linear interpolation between exact nodes: error <= max|mu'| / 8 * step^2
        bound = 11.4 / 8 * (1 / 2**14) ** 2
        np.testing.assert_allclose(edge.cdf(x), edge_cdf(x), atol=bound + 1e-12)

    def test_quantile_inverts_cdf(self, edge):
        u = np.linspace(0.001, 0.999, 500)
        np.testing.assert_allclose(edge.cdf(edge.quantile(u)), u, atol=1e-7)

    def test_ks_distance(self, edge):
        x = np.sort(sample_design(edge, 100_000, 7))
        F = edge_cdf(x)
        i = np.arange(1, x.size + 1) / x.size
        ks = max(np.max(i - F), np.max(F - (i - 1 / x.size)))
        # 99.9% quantile of the Kolmogorov distribution is about 1.95
        assert ks < 1.95 / math.sqrt(x.size)

    def test_edge_mass_near_boundary(self, edge):
        x = sample_design(edge, 100_000, 11)
        exact = 0.05 / 4 + 11.4 / 32  # E|X - 1/2| = 0.36875
        assert exact == pytest.approx(0.36875)
        m = np.mean(np.abs(x - 0.5))
        assert m > 0.25
        assert m == pytest.approx(exact, abs=4 * 0.15 / math.sqrt(x.size))

    def test_uniform_density(self, uniform):
        assert uniform(0.3) == pytest.approx(1.0)
        np.testing.assert_allclose(uniform.cdf([0, 0.25, 1]), [0, 0.25, 1], atol=1e-12)

    def test_table_density(self, tmp_path):
        p = tmp_path / "dens.csv"
        xs = np.linspace(0, 1, 101)
        p.write_text("x,density\n" + "".join(f"{a},{1 + a}\n" for a in xs))
        mu = table_density(p)
        assert mu(0.5) == pytest.approx(1.5 / 1.5, rel=1e-6)
        assert resolve_density(f"file:{p}")(0.0) == pytest.approx(1 / 1.5, rel=1e-6)

    def test_unknown_labels(self):
        with pytest.raises(ConfigError):
            resolve_density("nope")
        with pytest.raises(ConfigError):
            resolve_target("nope")


class TestTargets:
    def test_triangle(self, tri):
        np.testing.assert_allclose(tri([0, 0.2, 0.5, 0.8, 1]), [0, 0, 0.3, 0, 0], atol=1e-15)
        assert (tri.s, tri.L) == (1.0, 1.0)
        assert tri.l2_norm() == pytest.approx(0.3 * math.sqrt(0.2), rel=1e-8)

    @pytest.mark.parametrize("label", target_labels())
    def test_registry_members_in_class(self, label):
        f = resolve_target(label)
        assert holder_check(f, f.s, f.L).passed
        x = np.linspace(0, 1, 1001)
        assert np.max(np.abs(f(x))) <= f.Q + 1e-12


class TestSampling:
    def test_deterministic(self, tri, uniform):
        a = generate_dataset(tri, uniform, 0.1, 500, 42)
        b = generate_dataset(tri, uniform, 0.1, 500, 42)
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.y, b.y)
        c = generate_dataset(tri, uniform, 0.1, 500, 43)
        assert not np.array_equal(a.x, c.x)

    def test_streams_separate(self, tri, uniform):
        # changing sigma leaves the design untouched
        a = generate_dataset(tri, uniform, 0.0, 300, 5)
        b = generate_dataset(tri, uniform, 1.0, 300, 5)
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.y, tri(a.x))

    def test_noise_clt(self, uniform):
        zero = resolve_target("zero")
        d = generate_dataset(zero, uniform, 2.0, 20_000, 3)
        assert abs(d.y.mean()) < 4 * 2.0 / math.sqrt(d.n)
        assert d.y.std() == pytest.approx(2.0, rel=0.05)

    def test_dataset_immutable(self, tri, uniform):
        d = generate_dataset(tri, uniform, 0.1, 50, 1)
        with pytest.raises(ValueError):
            d.x[0] = 0.5
        assert np.all(np.diff(d.xs) >= 0)
        np.testing.assert_array_equal(np.sort(d.x), d.xs)

    def test_bad_inputs(self, tri, uniform):
        with pytest.raises(ValueError):
            generate_dataset(tri, uniform, -1.0, 10, 0)
        with pytest.raises(ValueError):
            sample_design(uniform, 0, 0)
        with pytest.raises(ValueError):
            Dataset.from_arrays([1.5], [0.0])

    def test_csv_roundtrip(self, tri, uniform, tmp_path):
        d = generate_dataset(tri, uniform, 0.1, 100, 9)
        p = tmp_path / "d.csv"
        write_dataset_csv(d, p)
        e = read_dataset_csv(p)
        np.testing.assert_array_equal(d.x, e.x)
        np.testing.assert_array_equal(d.y, e.y)
        assert e.meta["function"] == "triangle"


class TestEmpirical:
    d = Dataset.from_arrays([0.1, 0.2, 0.2, 0.7, 1.0], [1.0, 2.0, 3.0, 4.0, 5.0])

    def test_mass_examples(self):
        assert empirical_mass(self.d, (0.2, 0.7)) == pytest.approx(3 / 5)
        assert empirical_mass(self.d, (0.0, 1.0)) == 1.0
        assert empirical_mass(self.d, (0.3, 0.6)) == 0.0
        assert empirical_mass(self.d, (0.7, 0.2)) == 0.0
        assert count_in(self.d, 1.0, 1.0) == 1

    def test_inner_product_examples(self):
        one = lambda x: np.ones_like(x)
        sq = lambda x: x**2
        assert emp_inner_product(self.d, (0.0, 1.0), one, one) == pytest.approx(1.0)
        assert emp_inner_product(self.d, Interval(0.15, 0.25, 0.15), one, sq) == pytest.approx(0.04)
        with pytest.raises(EmptyIntervalError):
            emp_inner_product(self.d, (0.3, 0.6), one, one)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(0, 1), min_size=1, max_size=40),
        st.floats(0, 1),
        st.floats(0, 1),
        st.floats(-3, 3),
        st.floats(-3, 3),
    )
    def test_inner_product_symmetric_bilinear(self, xs, lo, w, a, b):
        d = Dataset.from_arrays(xs, np.zeros(len(xs)))
        I = (min(lo, w), max(lo, w))
        if count_in(d, *I) == 0:
            return
        g1, g2, g3 = np.sin, np.cos, lambda x: x**3
        ip = lambda u, v: emp_inner_product(d, I, u, v)
        assert ip(g1, g2) == pytest.approx(ip(g2, g1), abs=1e-12)
        lin = ip(lambda x: a * g1(x) + b * g3(x), g2)
        assert lin == pytest.approx(a * ip(g1, g2) + b * ip(g3, g2), abs=1e-10)
        assert ip(g1, g1) >= 0


class TestHolder:
    def test_triangle_on_boundary(self, tri):
        rep = holder_check(tri, 1.0, 1.0)
        assert rep.passed and rep.worst_ratio == pytest.approx(1.0, abs=1e-9)

    def test_doubled_triangle_fails(self, tri):
        rep = holder_check(lambda x: 2 * tri(x), 1.0, 1.0)
        assert not rep.passed and rep.worst_ratio == pytest.approx(2.0, abs=1e-6)

    def test_fractional(self):
        f = lambda x: 0.5 * np.sqrt(np.abs(x - 0.3))
        assert holder_check(f, 0.5, 0.5).passed
        assert not holder_check(f, 0.5, 0.4).passed

    def test_second_order(self):
        assert holder_check(lambda x: 0.5 * x**2, 2.0, 1.0).passed
        assert not holder_check(lambda x: 0.6 * x**2, 2.0, 1.0).passed
        assert holder_check(lambda x: np.sin(3 * x) / 9, 2.0, 1.0).k == 1
