#pragma once

#include <cmath>
#include <cstdlib>
#include <map>

namespace graphlag {

// R-valued 1-chain with finite core support plus one eventually-constant
// coefficient per tail. Zero coefficients are never stored, so chains compare
// by representation.
class Chain1 {
public:
    Chain1() = default;

    static Chain1 edge(int e, double c) {
        Chain1 out;
        out.add_core(e, c);
        return out;
    }

    void add_core(int e, double c) { accumulate(core_, e, c); }
    void add_tail(int t, double c) { accumulate(tails_, t, c); }

    double core_coeff(int e) const { return lookup(core_, e); }
    double tail_coeff(int t) const { return lookup(tails_, t); }

    const std::map<int, double>& core() const { return core_; }
    const std::map<int, double>& tails() const { return tails_; }

    bool is_zero() const { return core_.empty() && tails_.empty(); }

    double max_abs() const {
        double m = 0.0;
        for (const auto& [e, c] : core_) m = std::max(m, std::abs(c));
        for (const auto& [t, c] : tails_) m = std::max(m, std::abs(c));
        return m;
    }

    Chain1& operator+=(const Chain1& o) {
        for (const auto& [e, c] : o.core_) add_core(e, c);
        for (const auto& [t, c] : o.tails_) add_tail(t, c);
        return *this;
    }
    Chain1& operator-=(const Chain1& o) {
        for (const auto& [e, c] : o.core_) add_core(e, -c);
        for (const auto& [t, c] : o.tails_) add_tail(t, -c);
        return *this;
    }
    Chain1& operator*=(double s) {
        if (s == 0.0) {
            core_.clear();
            tails_.clear();
            return *this;
        }
        for (auto& [e, c] : core_) c *= s;
        for (auto& [t, c] : tails_) c *= s;
        return *this;
    }

    friend Chain1 operator+(Chain1 a, const Chain1& b) { return a += b; }
    friend Chain1 operator-(Chain1 a, const Chain1& b) { return a -= b; }
    friend Chain1 operator*(double s, Chain1 a) { return a *= s; }
    friend Chain1 operator-(Chain1 a) { return a *= -1.0; }

    friend bool operator==(const Chain1& a, const Chain1& b) {
        return a.core_ == b.core_ && a.tails_ == b.tails_;
    }

private:
    static void accumulate(std::map<int, double>& m, int key, double c) {
        auto it = m.find(key);
        if (it == m.end()) {
            if (c != 0.0) m.emplace(key, c);
            return;
        }
        it->second += c;
        if (it->second == 0.0) m.erase(it);
    }
    static double lookup(const std::map<int, double>& m, int key) {
        auto it = m.find(key);
        return it == m.end() ? 0.0 : it->second;
    }

    std::map<int, double> core_;   // edge index -> coefficient
    std::map<int, double> tails_;  // tail index -> coefficient
};

// R-valued 0-chain (finite support over vertices), same canonical storage.
class Chain0 {
public:
    Chain0() = default;

    void add(int v, double c) {
        auto it = coeffs_.find(v);
        if (it == coeffs_.end()) {
            if (c != 0.0) coeffs_.emplace(v, c);
            return;
        }
        it->second += c;
        if (it->second == 0.0) coeffs_.erase(it);
    }

    double coeff(int v) const {
        auto it = coeffs_.find(v);
        return it == coeffs_.end() ? 0.0 : it->second;
    }

    const std::map<int, double>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    double max_abs() const {
        double m = 0.0;
        for (const auto& [v, c] : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    friend bool operator==(const Chain0& a, const Chain0& b) {
        return a.coeffs_ == b.coeffs_;
    }

private:
    std::map<int, double> coeffs_;
};

}  // namespace graphlag
