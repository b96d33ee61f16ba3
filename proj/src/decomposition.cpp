#include "endstretch/decomposition.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace endstretch {

std::string StripLabel::name() const {
    return std::string(orientation == Orientation::vertical ? "V" : "H") + std::to_string(rect + 1) + "_" +
           std::to_string(source + 1) + "," + std::to_string(copy + 1);
}

SymbolicLength SymbolicLength::unit(Basis b, std::size_t n, std::size_t i) {
    auto s = zero(b, n);
    s.coefficients[i] = 1;
    return s;
}

bool SymbolicLength::is_zero() const {
    return std::all_of(coefficients.begin(), coefficients.end(), [](auto c) { return c == 0; });
}

SymbolicLength& SymbolicLength::operator+=(const SymbolicLength& o) {
    if (o.basis != basis || o.coefficients.size() != coefficients.size())
        fail(ErrorCode::internal, "adding symbolic lengths of different bases");
    for (std::size_t i = 0; i < coefficients.size(); ++i) coefficients[i] += o.coefficients[i];
    return *this;
}

double evaluate_length(const SymbolicLength& l, const PerronData& eigen) {
    const auto& v = l.basis == Basis::width ? eigen.omega : eigen.eta;
    if (v.size() != l.coefficients.size()) fail(ErrorCode::invalid_input, "symbolic length has wrong dimension");
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += static_cast<double>(l.coefficients[i]) * v[i];
    return s / eigen.lambda;
}

// ---------------------------------------------------------------- labels

std::vector<StripLabel> vertical_labels(const IntMatrix& m, std::size_t k) {
    std::vector<StripLabel> out;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::int64_t j = 0; j < m(i, k); ++j)
            out.push_back({Orientation::vertical, k, i, static_cast<std::size_t>(j)});
    return out;
}

std::vector<StripLabel> horizontal_labels(const IntMatrix& m, std::size_t k) {
    std::vector<StripLabel> out;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::int64_t j = 0; j < m(k, i); ++j)
            out.push_back({Orientation::horizontal, k, i, static_cast<std::size_t>(j)});
    return out;
}

std::size_t label_index(const std::vector<StripLabel>& order, const StripLabel& l) {
    auto it = std::lower_bound(order.begin(), order.end(), l);
    if (it == order.end() || !(*it == l)) fail(ErrorCode::internal, "unknown strip label " + l.name());
    return static_cast<std::size_t>(it - order.begin());
}

const StripLabel& StripDecomposition::vertical_occupant(std::size_t k, std::size_t slot) const {
    return vertical_order[k][tau[k][slot]];
}

const StripLabel& StripDecomposition::horizontal_occupant(std::size_t k, std::size_t slot) const {
    const auto& s = sigma[k];
    auto it = std::find(s.begin(), s.end(), slot);
    return horizontal_order[k][static_cast<std::size_t>(it - s.begin())];
}

std::size_t StripDecomposition::vertical_slot(const StripLabel& v) const {
    const auto& t = tau[v.rect];
    auto idx = label_index(vertical_order[v.rect], v);
    return static_cast<std::size_t>(std::find(t.begin(), t.end(), idx) - t.begin());
}

std::size_t StripDecomposition::horizontal_slot(const StripLabel& h) const {
    return sigma[h.rect][label_index(horizontal_order[h.rect], h)];
}

namespace {

bool is_permutation_of(const Permutation& p, std::size_t size) {
    if (p.size() != size) return false;
    std::vector<bool> seen(size, false);
    for (auto v : p) {
        if (v >= size || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

std::vector<Permutation> identities(const std::vector<std::vector<StripLabel>>& orders) {
    std::vector<Permutation> out;
    for (const auto& o : orders) {
        Permutation p(o.size());
        std::iota(p.begin(), p.end(), 0);
        out.push_back(p);
    }
    return out;
}

void check_permutations(const std::vector<Permutation>& perms, const std::vector<std::vector<StripLabel>>& orders,
                        const char* what) {
    if (perms.size() != orders.size())
        fail(ErrorCode::invalid_input, std::string(what) + ": one permutation per rectangle required");
    for (std::size_t k = 0; k < orders.size(); ++k)
        if (!is_permutation_of(perms[k], orders[k].size()))
            fail(ErrorCode::invalid_input,
                 std::string(what) + ": not a bijection on the labels of rectangle " + std::to_string(k + 1));
}

}  // namespace

StripDecomposition build_decomposition(const IntMatrix& m, const PerronData& eigen,
                                       const std::optional<std::vector<Permutation>>& sigma,
                                       const std::optional<std::vector<Permutation>>& tau) {
    const std::size_t n = m.size();
    if (n == 0) fail(ErrorCode::invalid_input, "matrix has dimension 0");
    if (eigen.eta.size() != n || eigen.omega.size() != n)
        fail(ErrorCode::invalid_input, "eigendata dimension does not match matrix");
    // lambda = 1 only for permutation matrices: nothing expands and no strip map contracts.
    if (!(eigen.lambda > 1 + 1e-12)) fail(ErrorCode::precondition, "spectral radius must exceed 1");
    StripDecomposition d;
    d.matrix = m;
    d.eigen = eigen;
    d.rect_widths = eigen.omega;
    d.rect_heights = eigen.eta;
    for (std::size_t k = 0; k < n; ++k) {
        d.vertical_order.push_back(vertical_labels(m, k));
        d.horizontal_order.push_back(horizontal_labels(m, k));
        if (d.vertical_order.back().empty() || d.horizontal_order.back().empty())
            fail(ErrorCode::precondition, "rectangle " + std::to_string(k + 1) + " has no strips");
    }
    d.sigma = sigma ? *sigma : identities(d.horizontal_order);
    d.tau = tau ? *tau : identities(d.vertical_order);
    check_permutations(d.sigma, d.horizontal_order, "sigma");
    check_permutations(d.tau, d.vertical_order, "tau");

    for (std::size_t k = 0; k < n; ++k) {
        std::vector<SymbolicLength> vb{SymbolicLength::zero(Basis::width, n)};
        for (std::size_t s = 0; s < d.vertical_count(k); ++s)
            vb.push_back(vb.back() + SymbolicLength::unit(Basis::width, n, d.vertical_occupant(k, s).source));
        std::vector<SymbolicLength> hb{SymbolicLength::zero(Basis::height, n)};
        for (std::size_t q = 0; q < d.horizontal_count(k); ++q)
            hb.push_back(hb.back() + SymbolicLength::unit(Basis::height, n, d.horizontal_occupant(k, q).source));
        d.vertical_bounds.push_back(std::move(vb));
        d.horizontal_bounds.push_back(std::move(hb));
    }
    return d;
}

// ---------------------------------------------------------------- piece map

PieceMap piece_map(const StripDecomposition& d) {
    PieceMap p;
    p.decomposition = d;
    for (std::size_t k = 0; k < d.size(); ++k) {
        p.first_branch.push_back(p.branches.size());
        for (std::size_t s = 0; s < d.vertical_count(k); ++s) {
            const auto& v = d.vertical_occupant(k, s);
            StripLabel h{Orientation::horizontal, v.source, k, v.copy};
            Branch b;
            b.label = v;
            b.source_rect = k;
            b.source_slot = s;
            b.target_rect = v.source;
            b.target_slot = d.horizontal_slot(h);
            b.source_left = d.vertical_bound(k, s);
            b.source_width = d.vertical_bound(k, s + 1) - b.source_left;
            b.target_top = d.horizontal_bound(b.target_rect, b.target_slot);
            b.target_height = d.horizontal_bound(b.target_rect, b.target_slot + 1) - b.target_top;
            p.branches.push_back(b);
        }
    }
    return p;
}

const Branch& PieceMap::into(std::size_t rect, std::size_t horizontal_slot) const {
    for (const auto& b : branches)
        if (b.target_rect == rect && b.target_slot == horizontal_slot) return b;
    fail(ErrorCode::internal, "horizontal strip without a branch");
}

PieceMap::Point PieceMap::apply(std::size_t rect, double x, double y) const {
    const auto& d = decomposition;
    std::size_t s = 0;
    while (s + 1 < d.vertical_count(rect) && x >= d.vertical_bound(rect, s + 1)) ++s;
    const Branch& b = at(rect, s);
    return {b.target_rect, (x - b.source_left) * d.eigen.lambda, b.target_top + y / d.eigen.lambda};
}

// ---------------------------------------------------------- corner selection

namespace {

std::vector<std::size_t> first_cycle_through_origin(const IntMatrix& m) {
    auto g = Digraph::of(m);
    std::vector<std::size_t> path{0};
    std::vector<bool> on_path(m.size(), false);
    on_path[0] = true;
    std::function<bool(std::size_t)> dfs = [&](std::size_t v) {
        for (auto w : g.successors(v)) {
            if (w == 0) return true;
            if (on_path[w]) continue;
            on_path[w] = true;
            path.push_back(w);
            if (dfs(w)) return true;
            path.pop_back();
            on_path[w] = false;
        }
        return false;
    };
    if (!dfs(0)) fail(ErrorCode::precondition, "no cycle through the first vertex");
    return path;
}

// Require perm[from] == to; complete by swapping with whatever held `to`.
void impose(Permutation& perm, std::size_t from, std::size_t to) {
    auto holder = static_cast<std::size_t>(std::find(perm.begin(), perm.end(), to) - perm.begin());
    std::swap(perm[from], perm[holder]);
}

}  // namespace

CornerSelection corner_selection(const IntMatrix& m) {
    if (!is_irreducible(m)) fail(ErrorCode::precondition, "corner selection requires an irreducible matrix");
    CornerSelection c;
    c.cycle = first_cycle_through_origin(m);
    std::vector<std::vector<StripLabel>> vo, ho;
    for (std::size_t k = 0; k < m.size(); ++k) {
        vo.push_back(vertical_labels(m, k));
        ho.push_back(horizontal_labels(m, k));
    }
    c.tau = identities(vo);
    c.sigma = identities(ho);
    const std::size_t len = c.cycle.size();
    for (std::size_t j = 0; j < len; ++j) {
        std::size_t s = c.cycle[j], next = c.cycle[(j + 1) % len];
        impose(c.tau[s], 0, label_index(vo[s], {Orientation::vertical, s, next, 0}));
        impose(c.sigma[next], label_index(ho[next], {Orientation::horizontal, next, s, 0}), 0);
    }
    return c;
}

}  // namespace endstretch
