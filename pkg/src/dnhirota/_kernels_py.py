"""Numpy implementations of the series kernels.

Used when the compiled ``_kernels`` extension is unavailable.  Signatures
match the Cython module exactly.
"""

import numpy as np


def mul_csr(a, b, row_ptr, cols, out):
    """out[cols[row_ptr[i] + j]] += a[i] * b[j] for every stored (i, j).

    ``row_ptr[i + 1] - row_ptr[i]`` is the number of ``b`` entries that may
    multiply ``a[i]`` without exceeding the truncation; those are always
    the leading entries of ``b`` because monomials are stored by degree.
    """
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return out
    lengths = row_ptr[nz + 1] - row_ptr[nz]
    total = int(lengths.sum())
    if total == 0:
        return out
    # flat positions of the selected rows inside cols
    starts = np.repeat(row_ptr[nz] - np.cumsum(lengths) + lengths, lengths)
    pos = np.arange(total) + starts
    jb = pos - np.repeat(row_ptr[nz], lengths)
    prod = np.repeat(a[nz], lengths) * b[jb]
    dst = cols[pos]
    m = out.shape[0]
    out += np.bincount(dst, weights=prod.real, minlength=m)
    out += 1j * np.bincount(dst, weights=prod.imag, minlength=m)
    return out


def scatter_scaled(src, dst, factor, a, out):
    """out[dst[k]] += factor[k] * a[src[k]]."""
    vals = factor * a[src]
    m = out.shape[0]
    out += np.bincount(dst, weights=vals.real, minlength=m)
    out += 1j * np.bincount(dst, weights=vals.imag, minlength=m)
    return out
