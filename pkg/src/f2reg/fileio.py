"""Text formats for tables, spectra, subspaces, and certificates.

Table file: a header line ``n=<k> scalar=<dyadic|rational|float> range=<tag>``
followed by 2^n value lines.  Dyadic values are written ``num/2^exp``,
rationals ``p/q``, floats as shortest round-trip decimals.  Spectrum files
are sparse: ``<gamma-bitstring> <value>`` per nonzero coefficient, with the
x_1 coordinate leftmost in the bitstring.  Certificates are JSON.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from . import f2core
from .f2core import Mat2
from .restrict import RegularityCertificate
from .scalars import Dyadic, format_rational, parse_rational
from .spectrum import FunctionTable, Spectrum


def _format_exact(v: Fraction, scalar: str) -> str:
    if scalar == "dyadic":
        return str(Dyadic.from_fraction(v))
    return format_rational(v)


def _parse_exact(text: str) -> Fraction:
    if "/2^" in text:
        return Dyadic.parse(text).to_fraction()
    return parse_rational(text)


def dump_table(table: FunctionTable) -> str:
    lines = [f"n={table.n} scalar={table.scalar} range={table.range_tag}"]
    if table.scalar == "float":
        lines += [repr(float(v)) for v in table.nums]
    else:
        lines += [_format_exact(Fraction(int(v), table.den), table.scalar) for v in table.nums]
    return "\n".join(lines) + "\n"


def load_table(text: str) -> FunctionTable:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    header = dict(item.split("=", 1) for item in lines[0].split())
    n = int(header["n"])
    scalar = header["scalar"]
    range_tag = header["range"]
    body = lines[1:]
    if len(body) != 1 << n:
        raise ValueError(f"expected {1 << n} values, got {len(body)}")
    if scalar == "float":
        return FunctionTable.from_floats(n, [float(x) for x in body], range_tag)
    vals = [_parse_exact(x) for x in body]
    return FunctionTable.from_fractions(n, vals, range_tag)


def dump_spectrum(spec: Spectrum) -> str:
    lines = [f"n={spec.n} scalar={spec.scalar}"]
    for g in spec.support():
        val = spec.coeff(g)
        if spec.scalar == "float":
            txt = repr(float(val))
        else:
            txt = _format_exact(val, spec.scalar)
        lines.append(f"{f2core.vec_to_str(g, spec.n)} {txt}")
    return "\n".join(lines) + "\n"


def dump_certificate(cert: RegularityCertificate) -> str:
    obj = {
        "n": cert.n,
        "M": [f2core.vec_to_str(r, cert.n) for r in cert.m.rows],
        "J": list(cert.j),
        "b": f2core.vec_to_str(cert.b, cert.n),
        "delta": format_rational(cert.delta),
    }
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_certificate(text: str) -> RegularityCertificate:
    obj = json.loads(text)
    n = int(obj["n"])
    rows = tuple(f2core.vec_from_str(r) for r in obj["M"])
    return RegularityCertificate(
        n, Mat2(n, rows), tuple(int(j) for j in obj["J"]),
        f2core.vec_from_str(obj["b"]), parse_rational(obj["delta"]),
    )


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
