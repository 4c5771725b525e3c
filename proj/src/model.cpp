#include "graphlag/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace graphlag {

namespace {

const CompiledExpr kZeroProgram{};

std::pair<int, int> sorted_pair(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

LagrangianSystem::LagrangianSystem(Graph graph, std::vector<Fiber> fibers,
                                   std::vector<InteractionTerm> terms,
                                   std::map<std::string, Eigen::VectorXd> configs,
                                   bool allow_ends)
    : graph_(std::move(graph)),
      fibers_(std::move(fibers)),
      terms_(std::move(terms)),
      configs_(std::move(configs)) {
    int n = graph_.vertex_count();
    if (static_cast<int>(fibers_.size()) != n)
        throw FiberMismatchError("one fiber required per vertex");
    offsets_.resize(n + 1, 0);
    for (int v = 0; v < n; ++v) {
        const Fiber& f = fibers_[v];
        if (f.dim < 1) throw FiberMismatchError("fiber dimension must be >= 1");
        if (f.kind == FiberKind::Circle && f.dim != 1)
            throw FiberMismatchError("circle fibers are one-dimensional");
        offsets_[v + 1] = offsets_[v] + f.dim;
        for (int i = 0; i < f.dim; ++i) coord_vertex_.emplace_back(v, i);
    }
    total_dim_ = offsets_[n];

    if (!allow_ends) {
        auto ends = graph_.end_vertices();
        if (!ends.empty()) {
            std::string msg = "vertices with degree < 2:";
            for (int v : ends) msg += " '" + graph_.vertex_name(v) + "'";
            throw DegreeViolationError(msg);
        }
    }

    for (auto& term : terms_) {
        if (term.vertices.empty())
            throw Error("term '" + term.name + "' has an empty vertex set");
        std::sort(term.vertices.begin(), term.vertices.end());
        if (std::adjacent_find(term.vertices.begin(), term.vertices.end()) !=
            term.vertices.end())
            throw Error("term '" + term.name + "' repeats a vertex");
        for (int v : term.vertices)
            if (v < 0 || v >= n)
                throw UnknownVertexError("term '" + term.name + "' vertex out of range");
        // every set must live in one component (checked via its diameter)
        set_diameter(graph_, term.vertices);
        for (const auto& key : term.potential.variables()) {
            auto vid = graph_.find_vertex(key.vertex);
            if (!vid || !std::binary_search(term.vertices.begin(), term.vertices.end(), *vid))
                throw UnknownVertexError("term '" + term.name + "' uses x(" + key.vertex +
                                         "," + std::to_string(key.coord) +
                                         ") outside its vertex set");
            if (key.coord >= fibers_[*vid].dim)
                throw FiberMismatchError("term '" + term.name + "' uses coordinate " +
                                         std::to_string(key.coord) + " of vertex '" +
                                         key.vertex + "' (fiber dimension " +
                                         std::to_string(fibers_[*vid].dim) + ")");
        }
    }

    for (const auto& [name, cfg] : configs_) {
        if (cfg.size() != total_dim_)
            throw FiberMismatchError("config '" + name + "' has " +
                                     std::to_string(cfg.size()) + " coordinates, expected " +
                                     std::to_string(total_dim_));
    }

    // compile value / gradient / Hessian programs per term
    auto resolve = [this](const VarKey& key) {
        return coord_index(graph_.vertex(key.vertex), key.coord);
    };
    calc_.reserve(terms_.size());
    for (const auto& term : terms_) {
        TermCalc tc;
        tc.value = CompiledExpr(term.potential, resolve);
        std::vector<std::pair<int, VarKey>> slots;
        for (const auto& key : term.potential.variables()) slots.emplace_back(resolve(key), key);
        std::sort(slots.begin(), slots.end());
        for (const auto& [slot, key] : slots) {
            tc.coords.push_back(slot);
            Expr d1 = term.potential.derivative(key);
            tc.d1.emplace(slot, std::make_pair(d1, CompiledExpr(d1, resolve)));
        }
        for (std::size_t i = 0; i < slots.size(); ++i) {
            for (std::size_t j = i; j < slots.size(); ++j) {
                Expr d2 = tc.d1.at(slots[i].first).first.derivative(slots[j].second);
                tc.d2.emplace(std::make_pair(slots[i].first, slots[j].first),
                              std::make_pair(d2, CompiledExpr(d2, resolve)));
            }
        }
        calc_.push_back(std::move(tc));
    }
}

int LagrangianSystem::coord_index(int v, int i) const {
    if (i < 0 || i >= fibers_.at(v).dim)
        throw FiberMismatchError("coordinate index " + std::to_string(i) +
                                 " out of range at vertex '" + graph_.vertex_name(v) + "'");
    return offsets_[v] + i;
}

std::pair<int, int> LagrangianSystem::coord_vertex(int coord) const {
    return coord_vertex_.at(coord);
}

Eigen::VectorXd LagrangianSystem::named_config(const std::string& name) const {
    auto it = configs_.find(name);
    if (it == configs_.end()) throw Error("no config named '" + name + "'");
    return it->second;
}

const CompiledExpr& LagrangianSystem::term_deriv1(int t, int a) const {
    const auto& d1 = calc_.at(t).d1;
    auto it = d1.find(a);
    return it == d1.end() ? kZeroProgram : it->second.second;
}

const CompiledExpr& LagrangianSystem::term_deriv2(int t, int a, int b) const {
    const auto& d2 = calc_.at(t).d2;
    auto it = d2.find(sorted_pair(a, b));
    return it == d2.end() ? kZeroProgram : it->second.second;
}

Expr LagrangianSystem::term_deriv2_expr(int t, int a, int b) const {
    const auto& d2 = calc_.at(t).d2;
    auto it = d2.find(sorted_pair(a, b));
    return it == d2.end() ? Expr() : it->second.first;
}

Expr LagrangianSystem::term_deriv3_expr(int t, int a, int b, int c) const {
    int s[3] = {a, b, c};
    std::sort(s, s + 3);
    const auto& d2 = calc_.at(t).d2;
    auto it = d2.find({s[0], s[1]});
    if (it == d2.end()) return Expr();
    auto [v, i] = coord_vertex(s[2]);
    return it->second.first.derivative(VarKey{graph_.vertex_name(v), i});
}

bool LagrangianSystem::term_couples(int t, int p, int q) const {
    const Fiber& fp = fibers_.at(p);
    const Fiber& fq = fibers_.at(q);
    for (int i = 0; i < fp.dim; ++i)
        for (int j = 0; j < fq.dim; ++j)
            if (!term_deriv2(t, coord_index(p, i), coord_index(q, j)).is_zero()) return true;
    return false;
}

double total_lagrangian(const LagrangianSystem& sys, const Eigen::VectorXd& config) {
    if (config.size() != sys.total_dim())
        throw FiberMismatchError("config dimension mismatch");
    double sum = 0.0;
    for (int t = 0; t < static_cast<int>(sys.terms().size()); ++t)
        sum += sys.term_value(t).eval(config);
    return sum;
}

int locality_bound(const LagrangianSystem& sys) {
    int m = 0;
    for (const auto& term : sys.terms())
        m = std::max(m, set_diameter(sys.graph(), term.vertices));
    return m;
}

Eigen::VectorXd fd_gradient(const LagrangianSystem& sys, const Eigen::VectorXd& config,
                            double step) {
    int n = sys.total_dim();
    Eigen::VectorXd g(n);
    Eigen::VectorXd x = config;
    for (int i = 0; i < n; ++i) {
        double xi = config[i];
        x[i] = xi + step;
        double fp = total_lagrangian(sys, x);
        x[i] = xi - step;
        double fm = total_lagrangian(sys, x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

Eigen::MatrixXd fd_hessian(const LagrangianSystem& sys, const Eigen::VectorXd& config,
                           double step) {
    int n = sys.total_dim();
    Eigen::MatrixXd h(n, n);
    Eigen::VectorXd x = config;
    double f0 = total_lagrangian(sys, config);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double v;
            if (i == j) {
                x[i] = config[i] + step;
                double fp = total_lagrangian(sys, x);
                x[i] = config[i] - step;
                double fm = total_lagrangian(sys, x);
                x[i] = config[i];
                v = (fp - 2.0 * f0 + fm) / (step * step);
            } else {
                x[i] = config[i] + step;
                x[j] = config[j] + step;
                double fpp = total_lagrangian(sys, x);
                x[j] = config[j] - step;
                double fpm = total_lagrangian(sys, x);
                x[i] = config[i] - step;
                double fmm = total_lagrangian(sys, x);
                x[j] = config[j] + step;
                double fmp = total_lagrangian(sys, x);
                x[i] = config[i];
                x[j] = config[j];
                v = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
            }
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// System file parser

namespace {

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && issp(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

Fiber parse_fiber(const std::string& text, int line) {
    if (text == "S1") return Fiber{FiberKind::Circle, 1};
    if (text.size() >= 2 && text[0] == 'R') {
        int m = 0;
        try {
            m = std::stoi(text.substr(1));
        } catch (...) {
            throw ParseError(line, "bad fiber spec '" + text + "'");
        }
        if (m < 1) throw ParseError(line, "fiber dimension must be >= 1");
        return Fiber{FiberKind::Euclidean, m};
    }
    throw ParseError(line, "bad fiber spec '" + text + "' (expected R<m> or S1)");
}

struct PendingTerm {
    std::string name;
    int line = 0;
    std::vector<std::string> vertices;
    std::string expr_text;
    bool has_expr = false;
    // (j, k, walk) by name; resolved once the graph is complete
    std::vector<std::array<std::vector<std::string>, 2>> paths;
};

}  // namespace

LagrangianSystem load_system(std::istream& in, bool allow_ends) {
    Graph graph;
    std::vector<Fiber> fibers;
    std::vector<PendingTerm> pending_terms;
    std::vector<std::pair<std::string, std::map<std::string, std::vector<double>>>> pending_cfgs;

    enum class Section { None, Graph, Term, Config };
    Section section = Section::None;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(lineno, "unterminated section header");
            std::string header = trim(line.substr(1, line.size() - 2));
            auto parts = words(header);
            if (parts.size() == 1 && parts[0] == "graph") {
                section = Section::Graph;
            } else if (parts.size() == 2 && parts[0] == "term") {
                section = Section::Term;
                pending_terms.push_back(PendingTerm{parts[1], lineno, {}, "", false, {}});
            } else if (parts.size() == 2 && parts[0] == "config") {
                section = Section::Config;
                pending_cfgs.emplace_back(parts[1], std::map<std::string, std::vector<double>>{});
            } else {
                throw ParseError(lineno, "unknown section '" + header + "'");
            }
            continue;
        }

        switch (section) {
            case Section::None:
                throw ParseError(lineno, "content before any section header");
            case Section::Graph: {
                auto parts = words(line);
                if (parts.empty()) break;
                if (parts[0] == "vertex") {
                    if (parts.size() < 2 || parts.size() > 3)
                        throw ParseError(lineno, "vertex NAME [fiber=R<m>|S1]");
                    Fiber f;
                    if (parts.size() == 3) {
                        if (parts[2].rfind("fiber=", 0) != 0)
                            throw ParseError(lineno, "unknown key '" + parts[2] + "'");
                        f = parse_fiber(parts[2].substr(6), lineno);
                    }
                    graph.add_vertex(parts[1]);
                    fibers.push_back(f);
                } else if (parts[0] == "edge") {
                    if (parts.size() != 3) throw ParseError(lineno, "edge NAME NAME");
                    graph.add_edge(parts[1], parts[2]);
                } else if (parts[0] == "tail") {
                    if (parts.size() < 3 || parts.size() > 4)
                        throw ParseError(lineno, "tail NAME attach=NAME [coupling=REAL]");
                    if (parts[2].rfind("attach=", 0) != 0)
                        throw ParseError(lineno, "expected attach=NAME");
                    double coupling = -1.0;
                    if (parts.size() == 4) {
                        if (parts[3].rfind("coupling=", 0) != 0)
                            throw ParseError(lineno, "unknown key '" + parts[3] + "'");
                        try {
                            coupling = std::stod(parts[3].substr(9));
                        } catch (...) {
                            throw ParseError(lineno, "bad coupling value");
                        }
                    }
                    graph.add_tail(parts[1], std::string_view(parts[2]).substr(7), coupling);
                } else {
                    throw ParseError(lineno, "unknown graph entry '" + parts[0] + "'");
                }
                break;
            }
            case Section::Term: {
                auto eq = line.find('=');
                if (eq == std::string::npos)
                    throw ParseError(lineno, "expected KEY = VALUE");
                std::string key = trim(line.substr(0, eq));
                std::string value = trim(line.substr(eq + 1));
                PendingTerm& term = pending_terms.back();
                if (key == "vertices") {
                    term.vertices = split(value, ',');
                } else if (key == "expr") {
                    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
                        value = value.substr(1, value.size() - 2);
                    term.expr_text = value;
                    term.has_expr = true;
                    term.line = lineno;
                } else if (key == "path") {
                    auto colon = value.find(':');
                    if (colon == std::string::npos)
                        throw ParseError(lineno, "path = J K : W0 W1 ... Wn");
                    auto ends = words(value.substr(0, colon));
                    auto walk = words(value.substr(colon + 1));
                    if (ends.size() != 2 || walk.size() < 2 || walk.front() != ends[0] ||
                        walk.back() != ends[1])
                        throw ParseError(lineno,
                                         "path walk must run from the first vertex to the second");
                    term.paths.push_back({std::move(ends), std::move(walk)});
                } else {
                    throw ParseError(lineno, "unknown term key '" + key + "'");
                }
                break;
            }
            case Section::Config: {
                auto eq = line.find('=');
                if (eq == std::string::npos)
                    throw ParseError(lineno, "expected VERTEX = values");
                std::string key = trim(line.substr(0, eq));
                auto vals = words(line.substr(eq + 1));
                std::vector<double> xs;
                for (const auto& v : vals) {
                    try {
                        xs.push_back(std::stod(v));
                    } catch (...) {
                        throw ParseError(lineno, "bad number '" + v + "'");
                    }
                }
                pending_cfgs.back().second[key] = std::move(xs);
                break;
            }
        }
    }

    // resolve terms
    std::vector<InteractionTerm> terms;
    for (auto& pt : pending_terms) {
        InteractionTerm term;
        term.name = pt.name;
        if (pt.vertices.empty())
            throw ParseError(pt.line, "term '" + pt.name + "' has no vertices");
        for (const auto& name : pt.vertices) term.vertices.push_back(graph.vertex(name));
        if (!pt.has_expr) throw ParseError(pt.line, "term '" + pt.name + "' has no expr");
        try {
            term.potential = parse(pt.expr_text);
        } catch (const SyntaxError& e) {
            throw ParseError(pt.line, std::string("in term '") + pt.name + "': " + e.what());
        }
        for (auto& [ends, walk] : pt.paths) {
            PathOverride po;
            po.j = graph.vertex(ends[0]);
            po.k = graph.vertex(ends[1]);
            for (const auto& w : walk) po.walk.push_back(graph.vertex(w));
            for (std::size_t i = 0; i + 1 < po.walk.size(); ++i)
                if (!graph.find_edge(po.walk[i], po.walk[i + 1]))
                    throw ParseError(pt.line, "path override walks a non-edge " + walk[i] +
                                                  "-" + walk[i + 1]);
            term.path_overrides.push_back(std::move(po));
        }
        terms.push_back(std::move(term));
    }

    // resolve configs
    std::map<std::string, Eigen::VectorXd> configs;
    std::vector<int> offsets(graph.vertex_count() + 1, 0);
    for (int v = 0; v < graph.vertex_count(); ++v) offsets[v + 1] = offsets[v] + fibers[v].dim;
    for (auto& [name, bind] : pending_cfgs) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(offsets.back());
        for (int v = 0; v < graph.vertex_count(); ++v) {
            auto it = bind.find(graph.vertex_name(v));
            if (it == bind.end())
                throw ParseError(0, "config '" + name + "' does not bind vertex '" +
                                        graph.vertex_name(v) + "'");
            if (static_cast<int>(it->second.size()) != fibers[v].dim)
                throw FiberMismatchError("config '" + name + "' binds vertex '" +
                                         graph.vertex_name(v) + "' with " +
                                         std::to_string(it->second.size()) +
                                         " values (fiber dimension " +
                                         std::to_string(fibers[v].dim) + ")");
            for (int i = 0; i < fibers[v].dim; ++i) x[offsets[v] + i] = it->second[i];
        }
        for (const auto& [vname, vals] : bind)
            graph.vertex(vname);  // unknown vertex in a config is an error
        configs.emplace(name, std::move(x));
    }

    return LagrangianSystem(std::move(graph), std::move(fibers), std::move(terms),
                            std::move(configs), allow_ends);
}

LagrangianSystem load_system(const std::filesystem::path& path, bool allow_ends) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return load_system(in, allow_ends);
}

}  // namespace graphlag
