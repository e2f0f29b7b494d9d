import numpy as np
import pytest

from proxtr.tridiag import GeneralTridiagMatrix, TridiagMatrix, assemble_mass, lump

from oracles import dense_general_tridiag, dense_tridiag


class TestAssembleMass:
    def test_two_dof_unit_width(self):
        m = assemble_mass(2, 1.0)
        np.testing.assert_allclose(m.diag, [4.0 / 6.0, 4.0 / 6.0])
        np.testing.assert_allclose(m.off, [1.0 / 6.0])

    def test_single_dof(self):
        m = assemble_mass(1, 1.0)
        np.testing.assert_allclose(m.diag, [4.0 / 6.0])
        assert m.off.size == 0

    def test_interior_row_sum_equals_width(self):
        m = assemble_mass(5, 0.2)
        assert m.row_sums()[2] == pytest.approx(0.2)

    @pytest.mark.parametrize("n_dof,h", [(0, 1.0), (3, 0.0), (3, -1.0)])
    def test_rejects_invalid_mesh(self, n_dof, h):
        with pytest.raises(ValueError):
            assemble_mass(n_dof, h)


class TestLump:
    def test_mass_three_dof(self):
        h = 0.375
        np.testing.assert_allclose(
            lump(assemble_mass(3, h)), [5 * h / 6, h, 5 * h / 6]
        )

    def test_identity(self):
        eye = TridiagMatrix(np.ones(4), np.zeros(3))
        np.testing.assert_allclose(lump(eye), np.ones(4))

    def test_two_dof(self):
        np.testing.assert_allclose(lump(assemble_mass(2, 1.0)), [5 / 6, 5 / 6])

    def test_rejects_nonpositive_row_sum(self):
        m = TridiagMatrix([1.0, 1.0], [-1.5])
        with pytest.raises(ValueError):
            lump(m)

    @pytest.mark.parametrize("n_dof", [1, 2, 7, 100, 1000])
    def test_lump_matches_apply_on_ones(self, n_dof):
        h = 0.7 / max(n_dof, 1)
        m = assemble_mass(n_dof, h)
        np.testing.assert_allclose(lump(m), m.apply(np.ones(n_dof)))


class TestApply:
    def test_identity(self):
        eye = TridiagMatrix(np.ones(5), np.zeros(4))
        v = np.arange(5.0)
        np.testing.assert_allclose(eye.apply(v), v)

    def test_mass_row_sums(self):
        m = assemble_mass(2, 1.0)
        np.testing.assert_allclose(m.apply(np.ones(2)), [5 / 6, 5 / 6])

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(7)
        for n in (1, 2, 3, 9, 40):
            diag = rng.uniform(1.0, 2.0, n)
            off = rng.standard_normal(max(n - 1, 0)) * 0.3
            v = rng.standard_normal(n)
            m = TridiagMatrix(diag, off)
            np.testing.assert_allclose(
                m.apply(v), dense_tridiag(diag, off) @ v, rtol=1e-13, atol=1e-13
            )

    def test_dimension_mismatch(self):
        m = assemble_mass(3, 1.0)
        with pytest.raises(ValueError):
            m.apply(np.ones(4))


class TestSolve:
    def test_identity(self):
        eye = TridiagMatrix(np.ones(6), np.zeros(5))
        rhs = np.linspace(-1, 1, 6)
        np.testing.assert_allclose(eye.solve(rhs), rhs)

    def test_two_by_two_hand_elimination(self):
        m = TridiagMatrix([2.0, 2.0], [1.0])
        np.testing.assert_allclose(m.solve([3.0, 3.0]), [1.0, 1.0])

    def test_solve_apply_round_trip(self):
        rng = np.random.default_rng(11)
        for n in (1, 2, 5, 64, 511):
            off = rng.uniform(0.1, 1.0, max(n - 1, 0))
            diag = rng.uniform(0.1, 1.0, n)
            if n > 1:
                diag[:-1] += off
                diag[1:] += off
            m = TridiagMatrix(diag, off)
            rhs = rng.standard_normal(n)
            x = m.solve(rhs)
            np.testing.assert_allclose(m.apply(x), rhs, rtol=1e-10, atol=1e-12)

    def test_residual_contract(self):
        m = assemble_mass(200, 1.0 / 201.0)
        rng = np.random.default_rng(3)
        rhs = rng.standard_normal(200)
        x = m.solve(rhs)
        resid = np.max(np.abs(m.apply(x) - rhs))
        assert resid <= 1e-12 * (1.0 + np.max(np.abs(rhs)))

    def test_signals_nonpositive_pivot(self):
        m = TridiagMatrix([1.0, 0.1], [1.0])
        with pytest.raises(np.linalg.LinAlgError):
            m.solve(np.ones(2))

    def test_dimension_mismatch(self):
        m = assemble_mass(3, 1.0)
        with pytest.raises(ValueError):
            m.solve(np.ones(2))


class TestConstruction:
    def test_rejects_bad_off_length(self):
        with pytest.raises(ValueError):
            TridiagMatrix([1.0, 1.0], [0.1, 0.1])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            TridiagMatrix([], [])

    def test_arrays_are_readonly(self):
        m = assemble_mass(3, 1.0)
        with pytest.raises(ValueError):
            m.diag[0] = 5.0


class TestGeneralTridiag:
    def _random(self, rng, n):
        return GeneralTridiagMatrix(
            rng.standard_normal(n - 1) * 0.2,
            rng.uniform(1.0, 2.0, n),
            rng.standard_normal(n - 1) * 0.2,
        )

    def test_apply_matches_dense(self):
        rng = np.random.default_rng(5)
        j = self._random(rng, 8)
        dense = dense_general_tridiag(j.lower, j.diag, j.upper)
        v = rng.standard_normal(8)
        np.testing.assert_allclose(j.apply(v), dense @ v, rtol=1e-13, atol=1e-14)
        np.testing.assert_allclose(
            j.apply_transpose(v), dense.T @ v, rtol=1e-13, atol=1e-14
        )

    def test_solve_matches_dense(self):
        rng = np.random.default_rng(6)
        j = self._random(rng, 12)
        dense = dense_general_tridiag(j.lower, j.diag, j.upper)
        rhs = rng.standard_normal(12)
        np.testing.assert_allclose(
            j.solve(rhs), np.linalg.solve(dense, rhs), rtol=1e-11, atol=1e-12
        )
        np.testing.assert_allclose(
            j.solve_transpose(rhs), np.linalg.solve(dense.T, rhs), rtol=1e-11, atol=1e-12
        )
