import numpy as np
import pytest

from dnhirota import _kernels_py, kernels
from dnhirota.series import TruncatedSeries, series_space


def _random(space, rng, density=0.5):
    c = rng.normal(size=space.size) + 1j * rng.normal(size=space.size)
    c[rng.random(space.size) > density] = 0
    return TruncatedSeries(space, c)


def test_backend_switching():
    names = kernels.available_backends()
    assert "python" in names
    previous = kernels.use_backend("python")
    assert kernels.backend() == "python"
    kernels.use_backend(previous)
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


def test_mul_backends_agree(rng):
    if "compiled" not in kernels.available_backends():
        pytest.skip("compiled extension not built")
    from dnhirota import _kernels

    space = series_space(4, 8, ("t", "y"))
    row_ptr, cols = space.mul_table
    for density in (0.05, 0.5, 1.0):
        a = _random(space, rng, density).coeffs
        b = _random(space, rng, density).coeffs
        out_c = np.zeros(space.size, dtype=complex)
        out_p = np.zeros(space.size, dtype=complex)
        _kernels.mul_csr(a, b, row_ptr, cols, out_c)
        _kernels_py.mul_csr(a, b, row_ptr, cols, out_p)
        assert np.allclose(out_c, out_p, atol=1e-12)


def test_scatter_backends_agree(rng):
    if "compiled" not in kernels.available_backends():
        pytest.skip("compiled extension not built")
    from dnhirota import _kernels

    space = series_space(5, 8, ("t", "y"))
    var = space.variables[2]
    src, dst, factor = space.derivative_map(var)
    a = _random(space, rng).coeffs
    out_c = np.zeros(space.size, dtype=complex)
    out_p = np.zeros(space.size, dtype=complex)
    _kernels.scatter_scaled(src, dst, factor, a, out_c)
    _kernels_py.scatter_scaled(src, dst, factor, a, out_p)
    assert np.allclose(out_c, out_p, atol=1e-12)


def test_mul_against_dense_convolution(backend, rng):
    # single weight-1 variable: truncated product is an ordinary convolution
    from dnhirota.series import Variable, make_space

    sp = make_space((Variable("t", "1", 1),), 12)
    a = rng.normal(size=13) + 0j
    b = rng.normal(size=13) + 0j
    got = (TruncatedSeries(sp, a) * TruncatedSeries(sp, b)).coeffs
    assert np.allclose(got, np.convolve(a, b)[:13], atol=1e-12)


def test_derivative_backend(backend):
    sp = series_space(4, 6, ("t",))
    v = sp.variables[0]
    s = TruncatedSeries.monomial(sp, {v: 3}, 2.0)
    assert s.derivative(v).coefficient({v: 2}) == 6.0


def test_zero_operand(backend):
    sp = series_space(4, 6, ("t",))
    z = TruncatedSeries.zero(sp)
    assert (z * TruncatedSeries.one(sp)).nnz() == 0


def test_fallback_when_extension_missing():
    # block the compiled module at import time and check the numpy path is chosen
    import subprocess
    import sys

    code = (
        "import sys, importlib.abc\n"
        "class Block(importlib.abc.MetaPathFinder):\n"
        "    def find_spec(self, name, path, target=None):\n"
        "        if name == 'dnhirota._kernels':\n"
        "            raise ImportError('blocked')\n"
        "sys.meta_path.insert(0, Block())\n"
        "from dnhirota import kernels\n"
        "from dnhirota.heisenberg import hierarchy_coefficients\n"
        "from dnhirota.hirota import context, gm_residual\n"
        "from dnhirota.series import TruncatedSeries\n"
        "assert kernels.available_backends() == ['python'], kernels.available_backends()\n"
        "one = TruncatedSeries.one(context(4, 6).t_space)\n"
        "assert gm_residual(one, one, hierarchy_coefficients(4)).max_abs() < 1e-12\n"
        "print(kernels.backend())\n"
    )
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "python"
