import logging
from dataclasses import dataclass, field
from itertools import product as cartesian
from math import prod
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from pgx.core import UNIT, PartialGroup, Word, canonical
from pgx.errors import InternalError, ResourceError, StructuralError, VerificationError
from pgx.extensions import Extension, OuterAction, TwistingPair, find_equivalence, twisted_product, \
    validate_twisting_pair
from pgx.linalg import diagonal, diagonal_matrix, invariant_factors, kernel, normal_form, solve, zeros
from pgx.maps import AutData
from pgx.utils import ORACLE_LIMIT, SEARCH_CAP

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


class CoefficientModule:
    """Z(M) written additively as a sum of cyclic groups, acted on by the base through Out(M).

    encode/decode are the only crossing between multiplicative center elements and additive vectors.
    """

    def __init__(self, aut: AutData):
        self._aut = aut
        p = aut.partial_group
        center = aut.center
        generators = [z for z in center if z != UNIT]
        position = {z: i for i, z in enumerate(generators)}
        k = len(generators)

        def unit_vector(z: int) -> np.ndarray:
            v = np.zeros(k, dtype=object)
            if z != UNIT:
                v[position[z]] = 1
            return v

        columns = [unit_vector(a) + unit_vector(b) - unit_vector(p.mul(a, b)) for a in generators for b in generators]
        relations = zeros(k, len(columns))
        for j, column in enumerate(columns):
            relations[:, j] = column
        _, d, _, s_inv, _ = normal_form(relations)
        orders = [abs(v) for v in diagonal(d, k)[:k]]
        if any(v == 0 for v in orders):
            raise InternalError(f"center of {p.name} is not finite")
        self._keep = [i for i, v in enumerate(orders) if v != 1]
        self._moduli = tuple(orders[i] for i in self._keep)
        self._s_inv = s_inv
        self._unit_vector = unit_vector

        self._encoded = {z: self._encode(z) for z in center}
        self._decoded = {v: z for z, v in self._encoded.items()}
        if len(self._decoded) != len(center) or len(center) != prod(self._moduli):
            raise InternalError(f"center of {p.name} does not decompose into {list(self._moduli)}")

        for eta in aut.normalizer:
            c = aut.conjugation(eta)
            if any(aut.apply(c, z) != z for z in center):
                raise InternalError(f"conjugation by {p.names[eta]} moves the center of {p.name}")
        self._matrices = [self._matrix(members[0]) for members in aut.out_classes]

    def _encode(self, z: int) -> Vector:
        v = self._s_inv @ self._unit_vector(z)
        return tuple(int(v[i]) % m for i, m in zip(self._keep, self._moduli))

    def _matrix(self, a: int) -> np.ndarray:
        r = self.rank
        m = zeros(r, r)
        for j in range(r):
            basis = tuple(1 if i == j else 0 for i in range(r))
            image = self.encode(self._aut.apply(a, self.decode(basis)))
            for i in range(r):
                m[i, j] = image[i]
        return m

    @property
    def aut(self) -> AutData:
        return self._aut

    @property
    def moduli(self) -> Tuple[int, ...]:
        return self._moduli

    @property
    def rank(self) -> int:
        return len(self._moduli)

    @property
    def order(self) -> int:
        return prod(self._moduli)

    def encode(self, z: int) -> Vector:
        try:
            return self._encoded[z]
        except KeyError:
            raise StructuralError(f"{self._aut.partial_group.names[z]} is not central")

    def decode(self, v: Sequence[int]) -> int:
        return self._decoded[tuple(int(x) % m for x, m in zip(v, self._moduli))]

    def action_matrix(self, out_class: int) -> np.ndarray:
        return self._matrices[out_class]

    def act(self, out_class: int, v: Sequence[int]) -> Vector:
        image = self._matrices[out_class] @ np.array(list(v), dtype=object)
        return tuple(int(x) % m for x, m in zip(image, self._moduli))

    def add(self, u: Sequence[int], v: Sequence[int]) -> Vector:
        return tuple((a + b) % m for a, b, m in zip(u, v, self._moduli))

    def neg(self, v: Sequence[int]) -> Vector:
        return tuple(-a % m for a, m in zip(v, self._moduli))


class CochainComplex:
    """Normalized cochains on the unit-free words of the base, differentials as integer matrices."""

    def __init__(self, action: OuterAction, module: CoefficientModule, max_degree: int):
        base = action.base
        if max_degree + 1 > base.level:
            raise StructuralError(f"degree {max_degree} needs words of length {max_degree + 1} but "
                                  f"{base.name} has level {base.level}")
        self._action = action
        self._module = module
        self._max_degree = max_degree
        self._bases: List[List[Word]] = [list(base.words(0))]
        self._bases.append([w for w in base.words(1) if len(w) == 1])
        for n in range(2, max_degree + 2):
            self._bases.append(base.domain_words(n))
        self._index = [{w: i for i, w in enumerate(words)} for words in self._bases]
        self._differentials = [self._differential(n) for n in range(max_degree + 1)]
        self._check_square_zero()

    def _differential(self, n: int) -> np.ndarray:
        base, r = self._action.base, self._module.rank
        source, target = self._bases[n], self._bases[n + 1]
        d = zeros(len(target) * r, len(source) * r)
        identity = np.eye(r, dtype=object)

        def add_block(row: int, face: Word, block: np.ndarray):
            face = canonical(face)
            if len(face) != n:
                return
            try:
                col = self._index[n][face]
            except KeyError:
                raise InternalError(f"face {base.word_str(face)} of a domain word is not stored")
            d[row * r:(row + 1) * r, col * r:(col + 1) * r] += block

        for row, w in enumerate(target):
            add_block(row, w[1:], self._module.action_matrix(self._action(w[0])))
            for i in range(1, n + 1):
                add_block(row, w[:i - 1] + (base.mul(w[i - 1], w[i]),) + w[i + 1:], (-1) ** i * identity)
            add_block(row, w[:-1], (-1) ** (n + 1) * identity)
        return d

    def _check_square_zero(self):
        for n in range(self._max_degree):
            composite = self._differentials[n + 1] @ self._differentials[n]
            moduli = self.moduli(n + 2)
            for i, m in enumerate(moduli):
                if any(v % m != 0 for v in composite[i]):
                    raise InternalError(f"delta squared is not zero in degree {n}")

    @property
    def action(self) -> OuterAction:
        return self._action

    @property
    def module(self) -> CoefficientModule:
        return self._module

    @property
    def base(self) -> PartialGroup:
        return self._action.base

    @property
    def max_degree(self) -> int:
        return self._max_degree

    def basis(self, n: int) -> List[Word]:
        return list(self._bases[n])

    def dimension(self, n: int) -> int:
        return len(self._bases[n]) * self._module.rank

    def moduli(self, n: int) -> List[int]:
        return list(self._module.moduli) * len(self._bases[n])

    def differential(self, n: int) -> np.ndarray:
        if not 0 <= n <= self._max_degree:
            raise StructuralError(f"no differential in degree {n}")
        return self._differentials[n]

    def cochain(self, n: int, values: Mapping[Word, int]) -> Vector:
        """Vector of the cochain with the given center-valued entries; missing words are 1."""
        vector: List[int] = []
        for w in self._bases[n]:
            vector.extend(self._module.encode(values.get(w, UNIT)))
        return tuple(vector)

    def values(self, n: int, vector: Sequence[int]) -> Dict[Word, int]:
        r = self._module.rank
        return {w: self._module.decode(vector[i * r:(i + 1) * r]) for i, w in enumerate(self._bases[n])}

    def reduce(self, n: int, vector: Sequence[int]) -> Vector:
        return tuple(int(v) % m for v, m in zip(vector, self.moduli(n)))

    def coboundary(self, n: int, vector: Sequence[int]) -> Vector:
        image = self.differential(n) @ np.array([int(v) for v in vector], dtype=object)
        return self.reduce(n + 1, image)

    def is_cocycle(self, n: int, vector: Sequence[int]) -> bool:
        return not any(self.coboundary(n, vector))

    def solve_coboundary(self, n: int, target: Sequence[int]) -> Optional[Vector]:
        """A cochain u in degree n - 1 with delta u = target, or None."""
        d = self.differential(n - 1)
        system = np.concatenate([d, diagonal_matrix(self.moduli(n))], axis=1)
        x = solve(system, target)
        if x is None:
            return None
        return self.reduce(n - 1, x[:d.shape[1]])


@dataclass
class CohomologyResult:
    degree: int
    orders: Tuple[int, ...]
    representatives: List[Vector]
    complex: CochainComplex = field(repr=False)
    _basis_s_inv: np.ndarray = field(repr=False, default=None)
    _basis_diagonal: List[int] = field(repr=False, default_factory=list)
    _quotient_s_inv: np.ndarray = field(repr=False, default=None)
    _summands: List[int] = field(repr=False, default_factory=list)

    @property
    def invariant_factors(self) -> List[int]:
        return invariant_factors(self.orders)

    @property
    def order(self) -> int:
        return prod(self.orders)

    def coordinates(self, cocycle: Sequence[int]) -> Tuple[int, ...]:
        if not self.complex.is_cocycle(self.degree, cocycle):
            raise VerificationError(f"not a cocycle in degree {self.degree}", witness=tuple(cocycle))
        if not self._summands:
            return ()
        x = self._basis_s_inv @ np.array([int(v) for v in cocycle], dtype=object)
        y = np.array([v // dz for v, dz in zip(x, self._basis_diagonal)], dtype=object)
        z = self._quotient_s_inv @ y
        return tuple(int(z[i]) % m for i, m in zip(self._summands, self.orders))

    def is_zero(self, cocycle: Sequence[int]) -> bool:
        return not any(self.coordinates(cocycle))

    def elements(self) -> Iterator[Tuple[int, ...]]:
        return cartesian(*(range(m) for m in self.orders))

    def cocycle(self, coordinates: Sequence[int]) -> Vector:
        total = [0] * self.complex.dimension(self.degree)
        for c, rep in zip(coordinates, self.representatives):
            total = [a + c * b for a, b in zip(total, rep)]
        return self.complex.reduce(self.degree, total)


def cohomology(complex: CochainComplex, n: int) -> CohomologyResult:
    """H^n as Z^k-lattices: cocycles mod (coboundaries + moduli), reduced with the integer normal form."""
    if not 0 <= n <= complex.max_degree:
        raise StructuralError(f"degree {n} outside 0..{complex.max_degree}")
    k = complex.dimension(n)
    if k == 0:
        return CohomologyResult(n, (), [], complex)
    moduli = complex.moduli(n)

    d = complex.differential(n)
    kernel_system = np.concatenate([d, -diagonal_matrix(complex.moduli(n + 1))], axis=1)
    spanning = kernel(kernel_system)[:k]
    s, dz_matrix, _, s_inv, _ = normal_form(spanning)
    dz = diagonal(dz_matrix, k)[:k]
    if any(v == 0 for v in dz):
        raise InternalError(f"cocycle lattice in degree {n} is not of full rank")

    boundary = diagonal_matrix(moduli)
    if n > 0:
        boundary = np.concatenate([complex.differential(n - 1), boundary], axis=1)
    in_basis = s_inv @ boundary
    for i, v in enumerate(dz):
        if any(x % v != 0 for x in in_basis[i]):
            raise InternalError(f"coboundaries in degree {n} leave the cocycle lattice")
        in_basis[i] = np.array([x // v for x in in_basis[i]], dtype=object)

    s2, d2, _, s2_inv, _ = normal_form(in_basis)
    orders = [abs(v) for v in diagonal(d2, k)[:k]]
    summands = [i for i, v in enumerate(orders) if v != 1]
    basis = s @ diagonal_matrix(dz)
    representatives = [complex.reduce(n, basis @ s2[:, i]) for i in summands]
    result = CohomologyResult(n, tuple(orders[i] for i in summands), representatives, complex,
                              s_inv, dz, s2_inv, summands)
    logger.debug("H^%d(%s): %s", n, complex.base.name, result.invariant_factors)
    return result


def _all_vectors(moduli: Sequence[int]) -> Iterator[Vector]:
    return cartesian(*(range(m) for m in moduli))


def brute_force_cohomology(complex: CochainComplex, n: int, limit: int = ORACLE_LIMIT) -> int:
    """|H^n| by enumerating every cochain; only for small complexes."""
    moduli = complex.moduli(n)
    size = prod(moduli)
    if size > limit:
        raise ResourceError(f"oracle needs {size} cochains in degree {n}, limit {limit}")
    cocycles = sum(1 for v in _all_vectors(moduli) if complex.is_cocycle(n, v))
    boundaries = {complex.reduce(n, [0] * len(moduli))}
    if n > 0:
        generators = [complex.coboundary(n - 1, [1 if i == j else 0 for i in range(complex.dimension(n - 1))])
                      for j in range(complex.dimension(n - 1))]
        frontier = list(boundaries)
        while frontier:
            grown = []
            for v in frontier:
                for g in generators:
                    w = complex.reduce(n, [a + b for a, b in zip(v, g)])
                    if w not in boundaries:
                        boundaries.add(w)
                        grown.append(w)
            frontier = grown
    return cocycles // len(boundaries)


def build_complex(action: OuterAction, max_degree: int = 3) -> CochainComplex:
    return CochainComplex(action, CoefficientModule(action.aut), max_degree)


@dataclass
class Obstruction:
    action: OuterAction
    t: Tuple[int, ...]
    eta: Dict[Tuple[int, int], int]
    kappa: Dict[Word, int]
    complex: CochainComplex
    h3: CohomologyResult
    class_is_zero: bool
    pair: Optional[TwistingPair]


def obstruction(action: OuterAction, lift_rank: int = 0) -> Obstruction:
    """The center-valued 3-cocycle of a lifted outer action, and a twisting pair when its class vanishes."""
    aut, base = action.aut, action.base
    fiber = aut.partial_group
    t = tuple(action.lift(g, lift_rank) for g in range(base.size))
    eta: Dict[Tuple[int, int], int] = {}
    for g, h in base.domain_words(2):
        alpha, beta = aut.compose(t[g], t[h]), t[base.mul(g, h)]
        candidates = [x for x in aut.normalizer if aut.is_morphism(alpha, x, beta)]
        if not candidates:
            raise StructuralError(f"no homotopy t({base.names[g]}).t({base.names[h]}) <- t({base.names[g]}"
                                  f"{base.names[h]}) in N({fiber.name})", witness=(g, h))
        eta[(g, h)] = candidates[0]
    pair = TwistingPair(base, fiber, aut, t, eta)

    center = set(aut.center)
    kappa: Dict[Word, int] = {}
    for g, h, k in base.domain_words(3):
        gh, hk = base.mul(g, h), base.mul(h, k)
        value = fiber.mul(fiber.mul(fiber.mul(pair.eta_of(g, h), pair.eta_of(gh, k)),
                                    fiber.inv(pair.eta_of(g, hk))),
                          fiber.inv(pair.twist(g, pair.eta_of(h, k))))
        if value not in center:
            raise InternalError(f"obstruction value at {base.word_str((g, h, k))} is not central")
        kappa[(g, h, k)] = value

    complex = build_complex(action, 3)
    vector = complex.cochain(3, kappa)
    if not complex.is_cocycle(3, vector):
        raise InternalError(f"obstruction of {fiber.name} by {base.name} is not a cocycle")
    h3 = cohomology(complex, 3)
    zero = h3.is_zero(vector)
    witness = None
    if zero:
        u = complex.solve_coboundary(3, vector) if any(vector) else (0,) * complex.dimension(2)
        if u is None:
            raise InternalError("obstruction class is zero but no cochain bounds it")
        shift = complex.values(2, u)
        corrected = {w: fiber.mul(shift[w], pair.eta_of(*w)) for w in base.domain_words(2)}
        try:
            witness = validate_twisting_pair(pair.with_eta(corrected))
        except VerificationError as e:
            raise InternalError(f"corrected eta is not a twisting pair: {e}", witness=e.witness)
    logger.debug("obstruction of %s by %s: class zero %s", fiber.name, base.name, zero)
    return Obstruction(action, t, eta, {w: z for w, z in kappa.items() if z != UNIT}, complex, h3, zero, witness)


@dataclass
class ExtensionClass:
    coordinates: Tuple[int, ...]
    pair: TwistingPair
    extension: Extension


class Classification:
    """Extensions realizing an outer action, one per element of H^2, with the torsor action of H^2."""

    def __init__(self, obstruction: Obstruction, h2: Optional[CohomologyResult], classes: List[ExtensionClass]):
        self._obstruction = obstruction
        self._h2 = h2
        self._classes = classes
        self._by_coordinates = {c.coordinates: i for i, c in enumerate(classes)}

    @property
    def obstruction(self) -> Obstruction:
        return self._obstruction

    @property
    def h2(self) -> Optional[CohomologyResult]:
        return self._h2

    @property
    def classes(self) -> List[ExtensionClass]:
        return list(self._classes)

    def __len__(self) -> int:
        return len(self._classes)

    def act(self, v: Sequence[int], index: int) -> int:
        coordinates = tuple((a + b) % m for a, b, m in zip(v, self._classes[index].coordinates, self._h2.orders))
        return self._by_coordinates[coordinates]

    def perturbed_pair(self, v: Sequence[int], index: int) -> TwistingPair:
        """The pair of a class with its eta multiplied by a representative cocycle of v."""
        pair = self._classes[index].pair
        complex = self._obstruction.complex
        shift = complex.values(2, self._h2.cocycle(v))
        fiber = pair.fiber
        return pair.with_eta({w: fiber.mul(shift[w], pair.eta_of(*w)) for w in pair.base.domain_words(2)})

    def verify_torsor(self, cap: int = SEARCH_CAP) -> bool:
        """Every v moves every class to act(v, class) and to no other class."""
        for v in self._h2.elements():
            for index in range(len(self._classes)):
                moved = twisted_product(self.perturbed_pair(v, index))
                target = self.act(v, index)
                for other, c in enumerate(self._classes):
                    found = find_equivalence(moved, c.extension, cap) is not None
                    if found != (other == target):
                        raise InternalError(f"H^2 action is not free and transitive at {v} on class {index}")
        return True


def classify_extensions(action: OuterAction, verify: bool = True, cap: int = SEARCH_CAP) -> Classification:
    obs = obstruction(action)
    if not obs.class_is_zero:
        return Classification(obs, None, [])
    h2 = cohomology(obs.complex, 2)
    fiber, base = action.aut.partial_group, action.base
    classes = []
    for coordinates in h2.elements():
        shift = obs.complex.values(2, h2.cocycle(coordinates))
        pair = obs.pair.with_eta({w: fiber.mul(shift[w], obs.pair.eta_of(*w)) for w in base.domain_words(2)})
        classes.append(ExtensionClass(tuple(coordinates), pair, twisted_product(pair)))
    if verify:
        for i in range(len(classes)):
            for j in range(i + 1, len(classes)):
                if find_equivalence(classes[i].extension, classes[j].extension, cap) is not None:
                    raise InternalError(f"classes {classes[i].coordinates} and {classes[j].coordinates} "
                                        f"are equivalent")
    logger.debug("%d extension classes of %s by %s", len(classes), fiber.name, base.name)
    return Classification(obs, h2, classes)
