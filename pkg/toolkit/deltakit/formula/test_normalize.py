import unittest

import sympy

from toolkit.deltakit.formula.ast import Rel
from toolkit.deltakit.formula.normalize import DNF_FALSE, DNF_TRUE, NormAtom, normalize
from toolkit.deltakit.formula.parse import parse, parse_or

X = sympy.Symbol("x1_0")
v0, v1 = sympy.symbols("v0 v1")


class TestNormalize(unittest.TestCase):
    def test_relation_algebra(self) -> None:
        self.assertEqual(normalize(parse("!(x <= 0)")).disjuncts, ((NormAtom(-X, Rel.LT),),))

    def test_content_removal(self) -> None:
        self.assertEqual(normalize(parse("2*x^2 - 2 = 0")).disjuncts, ((NormAtom(X**2 - 1, Rel.EQ),),))

    def test_duplicate_removal(self) -> None:
        self.assertEqual(normalize(parse("x > 0 | x > 0")).disjuncts, ((NormAtom(-X, Rel.LT),),))

    def test_squarefree_equation(self) -> None:
        self.assertEqual(normalize(parse_or("(v0 - 1)^2 = 0")).disjuncts, ((NormAtom(v0 - 1, Rel.EQ),),))

    def test_even_factor_becomes_nonvanishing(self) -> None:
        dnf = normalize(parse_or("v0^2*(v0 - 1) < 0"))
        self.assertEqual(len(dnf.disjuncts), 2)
        for conjunct in dnf.disjuncts:
            self.assertIn(NormAtom(v0 - 1, Rel.LT), conjunct)

    def test_square_is_never_negative(self) -> None:
        self.assertEqual(normalize(parse_or("v0^2 < 0")), DNF_FALSE)
        self.assertEqual(normalize(parse_or("v0^2 + 1 > 0")).disjuncts, ((NormAtom(-v0**2 - 1, Rel.LT),),))

    def test_constants_and_contradictions(self) -> None:
        self.assertEqual(normalize(parse("1 > 0")), DNF_TRUE)
        self.assertEqual(normalize(parse("x > 0 & x < 0")), DNF_FALSE)
        self.assertEqual(normalize(parse("x = 0 & x > 0")), DNF_FALSE)

    def test_absorption(self) -> None:
        dnf = normalize(parse_or("v0 > 0 | (v0 > 0 & v1 > 0)"))
        self.assertEqual(dnf.disjuncts, ((NormAtom(-v0, Rel.LT),),))

    def test_syntactic_variants_agree(self) -> None:
        self.assertEqual(normalize(parse_or("2*v1 = 0")), normalize(parse_or("v1 = 0")))
        self.assertEqual(normalize(parse_or("0 < v1")), normalize(parse_or("3*v1 > 0")))

    def test_atoms_are_sorted(self) -> None:
        dnf = normalize(parse_or("v0 < 1 & v1 = 0 & v0^2 > 0"))
        rels = [a.rel for a in dnf.disjuncts[0]]
        self.assertEqual(rels[0], Rel.EQ)


if __name__ == "__main__":
    unittest.main()
