#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace pshenv {

/// Closed-form scalar expression in the real coordinates of C^n (n = 1, 2).
///
/// Grammar: + - * / ^, parentheses, |...| (modulus), numbers, `pi`, `i`.
/// Coordinates: x1 y1 x2 y2 (x y alias x1 y1), complex z1 z2 (z aliases z1
/// when n = 1; for n = 2 only `|z|`, the Euclidean norm, is allowed).
/// Functions: re im abs exp log sqrt sin cos min max.
///
/// Values are computed in complex arithmetic; the result must be real.
/// Invalid evaluations (log of a non-positive number, complex result, ...)
/// return NaN or an infinity. Callers decide whether that is an error.
class Expression {
public:
    struct Node;

    Expression() = default;

    /// Throws Error(ParseError) with the column of the offending token.
    static Expression parse(std::string_view text, int dim);

    static Expression constant(double value, int dim);

    double operator()(std::span<const double> x) const;

    const std::string& text() const { return text_; }
    int dim() const { return dim_; }
    bool valid() const { return root_ != nullptr; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
    int dim_ = 1;
};

}  // namespace pshenv
