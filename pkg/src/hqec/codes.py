"""Stabilizer codes: builtin instances, validation, codewords, decoding.

A code is generators + logical X/Z representatives; codewords are built
as sparse states either from the classical-coset structure (CSS-origin
codes) or by projector iteration.  Builtin names cover the repetition
codes, the nine-qubit code, the Steane code, the [[15,1,3]] punctured
Reed-Muller code, and a deliberately mask-incompatible three-qubit code.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gf2
from .gf2 import ClassicalCode
from .pauli import PauliOperator, parse_pauli, transversal_pauli
from .states import SparseState, apply_pauli, combine, inner

EIGEN_TOL = 1e-10


class CodeFileError(ValueError):
    """Malformed code-definition file."""


class SubcodeError(ValueError):
    """C2 is not contained in C1."""


@dataclass(frozen=True)
class StabilizerCode:
    name: str
    n: int
    k: int
    generators: tuple[PauliOperator, ...]
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]
    css_origin: tuple[ClassicalCode, ClassicalCode] | None = None


@dataclass(frozen=True)
class ValidationReport:
    code_name: str
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {"code": self.code_name, "ok": self.ok, "violations": list(self.violations)}


@dataclass(frozen=True)
class CodeSpace:
    code: StabilizerCode
    basis: tuple[SparseState, ...]

    @property
    def zero(self) -> SparseState:
        return self.basis[0]

    @property
    def one(self) -> SparseState:
        return self.basis[1]


def _sympl_vec(p: PauliOperator, n: int) -> int:
    x = 0
    z = 0
    for i, w in enumerate(p.x.tolist()):
        x |= w << (64 * i)
    for i, w in enumerate(p.z.tolist()):
        z |= w << (64 * i)
    return x | (z << n)


def _reduce_tracked(vec: int, pauli: PauliOperator, basis: list):
    """Reduce vec against basis rows, multiplying the tracked group elements."""
    for bvec, bp in basis:
        piv = bvec & -bvec
        if vec & piv:
            vec ^= bvec
            pauli = pauli.multiply(bp)
    return vec, pauli


def validate_code(code: StabilizerCode) -> ValidationReport:
    """Report every violated code invariant; an empty report means valid."""
    v: list[str] = []
    gens = code.generators
    for i, g in enumerate(gens):
        if g.n != code.n:
            v.append(f"generator {i + 1} acts on {g.n} qubits, expected {code.n}")
    if len(gens) != code.n - code.k:
        v.append(f"expected {code.n - code.k} generators, got {len(gens)}")
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if gens[i].n == gens[j].n and not gens[i].commutes(gens[j]):
                v.append(f"generators {i + 1} ({gens[i]}) and {j + 1} ({gens[j]}) anticommute")

    basis: list = []
    for i, g in enumerate(gens):
        if g.n != code.n:
            continue
        vec, prod = _reduce_tracked(_sympl_vec(g, code.n), g, basis)
        if vec == 0:
            # prod is g times a product of earlier generators, equal to a phase
            if prod.phase == 0:
                v.append(f"generator {i + 1} ({g}) is dependent on earlier generators")
            else:
                v.append(f"-I is in the group generated (via generator {i + 1})")
        else:
            basis.append((vec, g))
            basis.sort(key=lambda row: row[0] & -row[0])

    if len(code.logical_x) != code.k or len(code.logical_z) != code.k:
        v.append(f"expected {code.k} logical X and Z operators")
    for label, ops in (("X", code.logical_x), ("Z", code.logical_z)):
        for j, p in enumerate(ops):
            if p.n != code.n:
                v.append(f"logical {label}[{j + 1}] acts on {p.n} qubits, expected {code.n}")
                continue
            for i, g in enumerate(gens):
                if g.n == code.n and not p.commutes(g):
                    v.append(f"logical {label}[{j + 1}] anticommutes with generator {i + 1}")
            vec, _ = _reduce_tracked(_sympl_vec(p, code.n), PauliOperator.identity(code.n), basis)
            if vec == 0:
                v.append(f"logical {label}[{j + 1}] lies in the stabilizer group")
    for j, xj in enumerate(code.logical_x):
        for l, zl in enumerate(code.logical_z):
            if xj.n != code.n or zl.n != code.n:
                continue
            if (j == l) == xj.commutes(zl):
                want = "anticommute" if j == l else "commute"
                v.append(f"logical X[{j + 1}] and Z[{l + 1}] must {want}")
    for label, ops in (("X", code.logical_x), ("Z", code.logical_z)):
        for j in range(len(ops)):
            for l in range(j + 1, len(ops)):
                if ops[j].n == code.n and ops[l].n == code.n and not ops[j].commutes(ops[l]):
                    v.append(f"logical {label}[{j + 1}] and {label}[{l + 1}] anticommute")
    return ValidationReport(code.name, tuple(v))


def _solve_f2(equations: list[tuple[int, int]]) -> int:
    """One solution x of the F2 system {(coeffs, rhs)}; raises if inconsistent."""
    pivots = []  # (pivot_bit, coeffs, rhs)
    for c, r in equations:
        for pb, pc, pr in pivots:
            if c & pb:
                c ^= pc
                r ^= pr
        if c == 0:
            if r:
                raise ValueError("inconsistent F2 system")
            continue
        pivots.append((c & -c, c, r))
    x = 0
    for pb, pc, pr in sorted(pivots, key=lambda t: -t[0]):
        acc = (pc & x).bit_count() & 1
        if acc ^ pr:
            x |= pb
    return x


def css_from_classical(c1: ClassicalCode, c2: ClassicalCode, name: str | None = None) -> StabilizerCode:
    """CSS code from nested classical codes: X checks from C2, Z checks from C1-dual."""
    if c1.length != c2.length:
        raise ValueError("classical codes differ in length")
    if not gf2.is_subcode(c2, c1):
        raise SubcodeError("C2 is not a subcode of C1")
    if c1.dimension <= c2.dimension:
        raise ValueError("need dim C1 > dim C2")
    n = c1.length
    k = c1.dimension - c2.dimension

    def x_op(word: int) -> PauliOperator:
        return PauliOperator.from_bits([(word >> q) & 1 for q in range(n)], [0] * n)

    def z_op(word: int) -> PauliOperator:
        return PauliOperator.from_bits([0] * n, [(word >> q) & 1 for q in range(n)])

    gens = [x_op(w) for w in c2.basis] + [z_op(w) for w in gf2.dual(c1).basis]

    # logical X from coset representatives of C1 mod C2, preferring the
    # all-ones word when it qualifies (it is then also transversal)
    e = (1 << n) - 1
    f_rows: list[int] = []
    if k == 1 and gf2.contains(c1, e) and not gf2.contains(c2, e):
        f_rows = [e]
    else:
        mod_basis = list(c2.basis)
        for row in c1.basis:
            r = row
            for b in gf2.rref(mod_basis, n):
                if r & (b & -b):
                    r ^= b
            if r:
                f_rows.append(r)
                mod_basis.append(r)
        f_rows = f_rows[:k]
    # logical Z duals: h_j in C2-dual with h_j . f_l = delta_jl
    c2_dual = gf2.dual(c2).basis
    h_rows = []
    for j in range(k):
        eqs = []
        for l in range(k):
            coeffs = 0
            for d, bd in enumerate(c2_dual):
                if (bd & f_rows[l]).bit_count() & 1:
                    coeffs |= 1 << d
            eqs.append((coeffs, 1 if j == l else 0))
        sol = _solve_f2(eqs)
        h = 0
        for d, bd in enumerate(c2_dual):
            if (sol >> d) & 1:
                h ^= bd
        h_rows.append(h)
    if k == 1 and gf2.contains(gf2.dual(c2), e) and (e & f_rows[0]).bit_count() & 1:
        h_rows = [e]

    return StabilizerCode(
        name or f"css-{n}-{k}",
        n,
        k,
        tuple(gens),
        tuple(x_op(f) for f in f_rows),
        tuple(z_op(h) for h in h_rows),
        css_origin=(c1, c2),
    )


_SHOR_GENERATORS = (
    "ZZIIIIIII",
    "IZZIIIIII",
    "IIIZZIIII",
    "IIIIZZIII",
    "IIIIIIZZI",
    "IIIIIIIZZ",
    "XXXXXXIII",
    "IIIXXXXXX",
)

_STEANE_C1_ROWS = ("1000011", "0100101", "0010110", "0001111")
_STEANE_C2_ROWS = ("0001111", "0110011", "1010101")

_RM15_ROWS = (
    "111111111111111",
    "000000011111111",
    "000111100001111",
    "011001100110011",
    "101010101010101",
)

BUILTIN_NAMES = ("bit_flip", "phase_flip", "shor", "steane", "rm15", "synthetic_incompatible")


def builtin_code(name: str) -> StabilizerCode:
    if name == "bit_flip":
        return StabilizerCode(
            name, 3, 1,
            (parse_pauli("ZZI"), parse_pauli("IZZ")),
            (parse_pauli("XXX"),),
            (parse_pauli("ZZZ"),),
        )
    if name == "phase_flip":
        return StabilizerCode(
            name, 3, 1,
            (parse_pauli("XXI"), parse_pauli("IXX")),
            (parse_pauli("ZZZ"),),
            (parse_pauli("XXX"),),
        )
    if name == "shor":
        # phase-repetition basis: transversal Z acts as logical X and vice versa
        return StabilizerCode(
            name, 9, 1,
            tuple(parse_pauli(s) for s in _SHOR_GENERATORS),
            (transversal_pauli("Z", 9),),
            (transversal_pauli("X", 9),),
        )
    if name == "steane":
        c1 = gf2.code_from_strings(_STEANE_C1_ROWS)
        c2 = gf2.code_from_strings(_STEANE_C2_ROWS)
        return css_from_classical(c1, c2, name="steane")
    if name == "rm15":
        c1 = gf2.code_from_strings(_RM15_ROWS)
        c2 = gf2.code_from_strings(_RM15_ROWS[1:])
        return css_from_classical(c1, c2, name="rm15")
    if name == "synthetic_incompatible":
        # ZZZ has odd overlap with transversal X, so mask compatibility fails
        return StabilizerCode(
            name, 3, 1,
            (parse_pauli("ZZZ"), parse_pauli("XXI")),
            (parse_pauli("IXX"),),
            (parse_pauli("ZZI"),),
        )
    raise ValueError(f"unknown builtin code {name!r}")


def logical_codewords(code: StabilizerCode) -> CodeSpace:
    """Orthonormal {|0>, |1>} logical basis as sparse states (k=1 only)."""
    if code.k != 1:
        raise ValueError(f"codeword construction supports k=1, got k={code.k}")
    if code.css_origin is not None:
        zero = gf2.coset_state(code.css_origin[1], 0)
    else:
        zero = None
        for seed in range(1 << code.n):
            st = SparseState.from_basis(code.n, seed)
            for g in list(code.generators) + [code.logical_z[0]]:
                st = combine([st, apply_pauli(st, g)], [0.5, 0.5])
                if st.norm() < 1e-9:
                    st = None
                    break
            if st is not None:
                zero = st.normalized()
                break
        if zero is None:
            raise ValueError(f"no codeword seed found for {code.name}")
    one = apply_pauli(zero, code.logical_x[0])

    for st in (zero, one):
        for g in code.generators:
            if abs(inner(st, apply_pauli(st, g)) - 1) > EIGEN_TOL:
                raise ValueError(f"{code.name}: codeword is not fixed by {g}")
    if abs(inner(zero, apply_pauli(zero, code.logical_z[0])) - 1) > EIGEN_TOL:
        raise ValueError(f"{code.name}: logical Z does not fix |0>")
    if abs(inner(one, apply_pauli(one, code.logical_z[0])) + 1) > EIGEN_TOL:
        raise ValueError(f"{code.name}: logical Z does not negate |1>")
    if abs(inner(zero, one)) > EIGEN_TOL:
        raise ValueError(f"{code.name}: logical basis states are not orthogonal")
    return CodeSpace(code, (zero, one))


def syndrome(code: StabilizerCode, error: PauliOperator) -> tuple[int, ...]:
    """Bit i is 1 iff the error anticommutes with generator i."""
    if error.n != code.n:
        raise ValueError(f"error acts on {error.n} qubits, code has {code.n}")
    return tuple(0 if error.commutes(g) else 1 for g in code.generators)


def decode_single_error(code: StabilizerCode, s) -> PauliOperator | None:
    """Minimum-weight error matching the syndrome among weight <= 1 Paulis.

    Ties break by (qubit index, X < Y < Z); returns None for syndromes no
    single error produces.
    """
    table: dict[tuple[int, ...], PauliOperator] = {}
    candidates = [PauliOperator.identity(code.n)]
    for q in range(1, code.n + 1):
        for kind in ("X", "Y", "Z"):
            candidates.append(PauliOperator.single(code.n, q, kind))
    for err in candidates:
        table.setdefault(syndrome(code, err), err)
    return table.get(tuple(int(b) for b in s))


def parse_code_text(text: str, name: str = "user") -> StabilizerCode:
    """Code-definition file: header 'n k', then n-k generators, k logical
    X strings, k logical Z strings; '#' starts a comment."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise CodeFileError("empty code definition")
    header = lines[0].split()
    if len(header) != 2:
        raise CodeFileError(f"header must be 'n k', got {lines[0]!r}")
    try:
        n, k = int(header[0]), int(header[1])
    except ValueError as exc:
        raise CodeFileError(f"header must be 'n k', got {lines[0]!r}") from exc
    expected = (n - k) + 2 * k
    body = lines[1:]
    if len(body) != expected:
        raise CodeFileError(f"expected {expected} operator lines, got {len(body)}")
    try:
        ops = [parse_pauli(s) for s in body]
    except ValueError as exc:
        raise CodeFileError(str(exc)) from exc
    for p in ops:
        if p.n != n:
            raise CodeFileError(f"operator {p} acts on {p.n} qubits, expected {n}")
    gens = tuple(ops[: n - k])
    lx = tuple(ops[n - k: n - k + k])
    lz = tuple(ops[n - k + k:])
    return StabilizerCode(name, n, k, gens, lx, lz)


def format_code_text(code: StabilizerCode) -> str:
    lines = [f"{code.n} {code.k}"]
    lines += [p.to_string() for p in code.generators]
    lines += [p.to_string() for p in code.logical_x]
    lines += [p.to_string() for p in code.logical_z]
    return "\n".join(lines) + "\n"
