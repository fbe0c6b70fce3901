#pragma once
#include <map>
#include <memory>
#include <string>

#include "solitonlab/types.hpp"

namespace solitonlab {

// Arithmetic expression over named variables: +, -, *, /, ^, parentheses,
// sin cos tan exp log sqrt, numeric literals. Parsed once, evaluated at
// points. Parse failures raise ConfigError naming the offending token.
class Expr {
public:
    using VarMap = std::map<std::string, int>; // name -> point component

    Expr() = default;

    static Expr parse(const std::string& text, const VarMap& vars);

    double eval(const Vec& point) const;
    bool valid() const { return root_ != nullptr; }
    const std::string& text() const { return text_; }

    // x1..xdim plus aliases x,y,z (and w when dim >= 4).
    static VarMap chart_vars(int dim);
    // t1..tn for patch parameters.
    static VarMap patch_vars(int n);

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace solitonlab
