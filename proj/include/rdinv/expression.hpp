#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace rdinv::expr {

/// Evaluation environment for the expression grammar. Variables not set by
/// the caller default to zero.
struct Env {
    double x = 0.0;
    double t = 0.0;
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
};

class Node;
using NodePtr = std::shared_ptr<const Node>;

/// Parses an arithmetic expression over the variables u, v, w, x, t with
/// operators + - * / ^ (right-associative power), unary minus, parentheses,
/// and the functions sin, cos, exp, atan, sqrt, abs, max, min.
/// Throws ConfigError with a character position on malformed input.
NodePtr parse(std::string_view text);

double eval(const NodePtr& node, const Env& env);

/// Exact symbolic derivative with respect to one of the variables
/// 'x','t','u','v','w'. max/min/abs differentiate branch-wise.
NodePtr diff(const NodePtr& node, char var);

bool depends_on(const NodePtr& node, char var);

/// True when the expression contains no variables; *value receives the
/// folded constant.
bool is_constant(const NodePtr& node, double* value = nullptr);

std::string to_string(const NodePtr& node);

}  // namespace rdinv::expr
