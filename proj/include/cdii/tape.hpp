#pragma once

#include "cdii/common.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace cdii {

using NodeId = std::int32_t;

/// Raised when an operation would put a non-finite value or partial on the
/// tape, or when an operand violates a precondition (division by zero, sqrt
/// of a nonpositive value). Carries the index of the offending node.
class TapeError : public NumericError {
public:
    TapeError(const std::string& what, NodeId node)
        : NumericError(what + " (node " + std::to_string(node) + ")"), node_(node) {}

    NodeId node() const { return node_; }

private:
    NodeId node_;
};

/// One scalar node of the computation graph: its value, at most two parent
/// indices, and the local partials d(value)/d(parent). Leaves have no
/// parents. Nodes are immutable once appended and parents always precede
/// children, so a single reverse sweep propagates adjoints exactly.
struct TapeNode {
    double value;
    NodeId parent0;
    NodeId parent1;
    double partial0;
    double partial1;
};

enum class UnaryOp { Neg, Square, Sqrt, Tanh };
enum class BinaryOp { Add, Sub, Mul, Div };

class Tape {
public:
    /// Appends a trainable leaf. Gradients of any downstream root with
    /// respect to it are retrievable from backward().
    NodeId variable(double value) {
        if (!std::isfinite(value)) {
            throw TapeError("non-finite value for variable", static_cast<NodeId>(nodes_.size()));
        }
        const NodeId id = append(value, -1, -1, 0.0, 0.0);
        params_.push_back(id);
        return id;
    }

    /// Appends a frozen leaf (inputs, observations, literals).
    NodeId constant(double value) {
        if (!std::isfinite(value)) {
            throw TapeError("non-finite value for constant", static_cast<NodeId>(nodes_.size()));
        }
        return append(value, -1, -1, 0.0, 0.0);
    }

    // Per-op record paths. Operand values are finite by the tape invariant,
    // so each op only checks what it can actually produce: tanh stays
    // finite, arithmetic can overflow in the value, div and sqrt can blow up
    // a partial as well.
    NodeId add(NodeId a, NodeId b) {
        const double v = val(a) + val(b);
        if (!std::isfinite(v)) {
            throw TapeError("non-finite result", next_id());
        }
        return append(v, a, b, 1.0, 1.0);
    }

    NodeId sub(NodeId a, NodeId b) {
        const double v = val(a) - val(b);
        if (!std::isfinite(v)) {
            throw TapeError("non-finite result", next_id());
        }
        return append(v, a, b, 1.0, -1.0);
    }

    NodeId mul(NodeId a, NodeId b) {
        const double va = val(a);
        const double vb = val(b);
        const double v = va * vb;
        if (!std::isfinite(v)) {
            throw TapeError("non-finite result", next_id());
        }
        return append(v, a, b, vb, va);
    }

    NodeId div(NodeId a, NodeId b) {
        const double vb = val(b);
        if (vb == 0.0) {
            throw TapeError("division by zero", b);
        }
        const double va = val(a);
        const double v = va / vb;
        const double da = 1.0 / vb;
        const double db = -v * da;
        if (!(std::isfinite(v) && std::isfinite(da) && std::isfinite(db))) {
            throw TapeError("non-finite result", next_id());
        }
        return append(v, a, b, da, db);
    }

    NodeId neg(NodeId a) { return append(-val(a), a, -1, -1.0, 0.0); }

    NodeId square(NodeId a) {
        const double va = val(a);
        const double v = va * va;
        if (!std::isfinite(v)) {
            throw TapeError("non-finite result", next_id());
        }
        return append(v, a, -1, 2.0 * va, 0.0);
    }

    NodeId sqrt(NodeId a) {
        const double va = val(a);
        if (!(va > 0.0)) {
            throw TapeError("sqrt of nonpositive value", a);
        }
        const double v = std::sqrt(va);
        const double da = 0.5 / v;
        if (!std::isfinite(da)) {
            throw TapeError("non-finite result", next_id());
        }
        return append(v, a, -1, da, 0.0);
    }

    NodeId tanh(NodeId a) {
        const double v = std::tanh(val(a));
        return append(v, a, -1, 1.0 - v * v, 0.0);
    }

    NodeId record_binary(BinaryOp op, NodeId a, NodeId b) {
        switch (op) {
        case BinaryOp::Add:
            return add(a, b);
        case BinaryOp::Sub:
            return sub(a, b);
        case BinaryOp::Mul:
            return mul(a, b);
        case BinaryOp::Div:
            return div(a, b);
        }
        throw TapeError("invalid binary op", next_id());
    }

    NodeId record_unary(UnaryOp op, NodeId a) {
        switch (op) {
        case UnaryOp::Neg:
            return neg(a);
        case UnaryOp::Square:
            return square(a);
        case UnaryOp::Sqrt:
            return sqrt(a);
        case UnaryOp::Tanh:
            return tanh(a);
        }
        throw TapeError("invalid unary op", next_id());
    }

    double value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    const TapeNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t num_params() const { return params_.size(); }
    const std::vector<NodeId>& params() const { return params_; }

    void reserve(std::size_t n) { nodes_.reserve(n); }

    /// Drops all nodes but keeps the allocated capacity; used when a tape
    /// object is recycled between batches.
    void clear() {
        nodes_.clear();
        params_.clear();
    }

    /// mark()/rewind() let a shard reuse one parameter binding for many
    /// samples: bind the parameters, mark, then rewind between samples.
    /// Rewinding to a mark taken right after binding is equivalent to
    /// clearing and rebinding (same ids, same values).
    std::size_t mark() const { return nodes_.size(); }

    void rewind(std::size_t mark) {
        nodes_.resize(mark);
        while (!params_.empty() && static_cast<std::size_t>(params_.back()) >= mark) {
            params_.pop_back();
        }
    }

    /// Adjoints of root with respect to every node, computed in a single
    /// reverse sweep. Entry v of the result is d(root)/d(node v); trainable
    /// leaves are read off at their indices. Accumulation order is fixed by
    /// the tape order, so results are bitwise reproducible.
    std::vector<double> backward(NodeId root) const {
        std::vector<double> adjoint;
        backward_into(root, 1.0, adjoint);
        return adjoint;
    }

    /// Same as backward() but writes into a caller-owned buffer (resized to
    /// the tape length) and seeds the root with `seed` instead of 1.
    void backward_into(NodeId root, double seed, std::vector<double>& adjoint) const {
        adjoint.assign(nodes_.size(), 0.0);
        adjoint[static_cast<std::size_t>(root)] = seed;
        for (NodeId i = root; i >= 0; --i) {
            const double a = adjoint[static_cast<std::size_t>(i)];
            if (a == 0.0) {
                continue;
            }
            const TapeNode& n = nodes_[static_cast<std::size_t>(i)];
            if (n.parent0 >= 0) {
                adjoint[static_cast<std::size_t>(n.parent0)] += a * n.partial0;
            }
            if (n.parent1 >= 0) {
                adjoint[static_cast<std::size_t>(n.parent1)] += a * n.partial1;
            }
        }
    }

private:
    double val(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    NodeId next_id() const { return static_cast<NodeId>(nodes_.size()); }

    NodeId append(double v, NodeId p0, NodeId p1, double d0, double d1) {
        nodes_.push_back(TapeNode{v, p0, p1, d0, d1});
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    std::vector<TapeNode> nodes_;
    std::vector<NodeId> params_;
};

/// Lightweight handle for building tape expressions with operator syntax.
struct Expr {
    Tape* tape = nullptr;
    NodeId id = -1;

    double value() const { return tape->value(id); }
};

inline Expr wrap(Tape& t, NodeId id) { return Expr{&t, id}; }

inline Expr operator+(Expr a, Expr b) { return wrap(*a.tape, a.tape->add(a.id, b.id)); }
inline Expr operator-(Expr a, Expr b) { return wrap(*a.tape, a.tape->sub(a.id, b.id)); }
inline Expr operator*(Expr a, Expr b) { return wrap(*a.tape, a.tape->mul(a.id, b.id)); }
inline Expr operator/(Expr a, Expr b) { return wrap(*a.tape, a.tape->div(a.id, b.id)); }
inline Expr operator-(Expr a) { return wrap(*a.tape, a.tape->neg(a.id)); }
inline Expr square(Expr a) { return wrap(*a.tape, a.tape->square(a.id)); }
inline Expr sqrt(Expr a) { return wrap(*a.tape, a.tape->sqrt(a.id)); }
inline Expr tanh(Expr a) { return wrap(*a.tape, a.tape->tanh(a.id)); }

} // namespace cdii
