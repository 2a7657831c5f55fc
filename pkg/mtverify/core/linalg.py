"""
Exact linear algebra for mtverify

Thin conversions between Fraction-valued row lists and sympy DomainMatrix
over QQ and ZZ, which does the actual elimination.
"""

from fractions import Fraction
from typing import List, Sequence

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from ..errors import SingularOperator


Rows = Sequence[Sequence]


def fraction_to_qq(x) -> object:
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def qq_to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def to_qq_matrix(rows: Rows, ncols: int = 0) -> DomainMatrix:
    """Build a DomainMatrix over QQ from a list of rows of rationals"""
    if not rows:
        return DomainMatrix.zeros((0, ncols), QQ).to_dense()
    data = [[fraction_to_qq(x) for x in row] for row in rows]
    return DomainMatrix(data, (len(data), len(data[0])), QQ)


def to_fraction_rows(matrix: DomainMatrix) -> List[List[Fraction]]:
    return [[qq_to_fraction(x) for x in row] for row in matrix.to_list()]


def nullspace_qq(rows: Rows) -> List[List[Fraction]]:
    """
    Basis of the right kernel of a rational matrix

    Returns:
        List of basis vectors (possibly empty)
    """
    if not rows:
        return []
    kernel = to_qq_matrix(rows).nullspace()
    return to_fraction_rows(kernel)


def rank_qq(rows: Rows) -> int:
    if not rows:
        return 0
    return to_qq_matrix(rows).rank()


def inverse_qq(rows: Rows) -> List[List[Fraction]]:
    """
    Inverse of a square rational matrix

    Raises:
        SingularOperator: If the matrix is not invertible
    """
    try:
        return to_fraction_rows(to_qq_matrix(rows).inv())
    except DMNonInvertibleMatrixError as e:
        raise SingularOperator(f"matrix is not invertible: {e}")


def solve_qq(rows: Rows, rhs: Sequence) -> List[Fraction]:
    """
    Solve A x = b for square invertible A

    Raises:
        SingularOperator: If A is singular
    """
    matrix = to_qq_matrix(rows)
    column = to_qq_matrix([[x] for x in rhs])
    try:
        solution = matrix.lu_solve(column)
    except DMNonInvertibleMatrixError as e:
        raise SingularOperator(f"system has no unique solution: {e}")
    return [row[0] for row in to_fraction_rows(solution)]


def matmul_qq(left: Rows, right: Rows) -> List[List[Fraction]]:
    return to_fraction_rows(to_qq_matrix(left) * to_qq_matrix(right))


def identity(size: int) -> List[List[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]


def det_zz(rows: Rows) -> int:
    """Determinant of an integer matrix (fraction-free elimination)"""
    if not rows:
        return 1
    data = [[ZZ(int(x)) for x in row] for row in rows]
    return int(DomainMatrix(data, (len(data), len(data[0])), ZZ).det())
