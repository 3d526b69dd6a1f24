#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "effcon/scalar_expr.hpp"

namespace effcon {

// Dense matrices over the field of rational functions.
using Row = std::vector<ScalarExpr>;
using Matrix = std::vector<Row>;

Matrix identity_matrix(int n);
Matrix multiply(const Matrix& a, const Matrix& b);

struct Echelon {
  Matrix rref;
  std::vector<int> pivots;  // pivot column per nonzero row
};

// Gauss-Jordan elimination. Columns are scanned in the given order (default:
// left to right); within a column the simplest nonzero entry is the pivot.
Echelon row_reduce(Matrix m, const std::vector<int>& column_order = {});
// Generic rank by evaluation at pseudo-random points modulo a 61-bit prime.
int rank(const Matrix& m);
// Rank by exact elimination over the function field.
int exact_rank(const Matrix& m);
// Basis of {x : m x = 0}; each vector has a 1 at its free column.
std::vector<Row> null_space(const Matrix& m, int cols, const std::vector<int>& column_order = {});
std::optional<Matrix> inverse(const Matrix& m);

// Puts the expressions over one denominator and returns the numerators.
std::vector<Polynomial> clear_denominators(const std::vector<ScalarExpr>& v);

// Splits polynomials into coefficients over the monomials in the symbols not
// accepted by `is_coefficient`. Row k of the result holds the coefficients of
// the k-th such monomial, one column per input.
Matrix coefficient_matrix(const std::vector<Polynomial>& polys, const std::function<bool(Symbol)>& is_coefficient);

}  // namespace effcon
