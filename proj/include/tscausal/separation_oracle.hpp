#pragma once

// A CI test that answers queries from the ground-truth graph instead of data:
// X independent of Y given Z iff X and Y are d-separated by Z in the unrolled
// lagged graph. Ball-passing reachability over (variable, time-offset) nodes;
// offsets grow into the past up to a horizon far beyond any conditioning lag.
// Nodes after the target time never carry an active path (they would need a
// conditioned descendant, and conditioning sets only reach into the past), so
// the walk stays at offsets >= 0.

#include <cstddef>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "tscausal/ci_test.hpp"
#include "tscausal/synthgen.hpp"

namespace tscausal {

class SeparationOracle final : public CITest {
public:
    explicit SeparationOracle(GroundTruthGraph truth, int horizon = 500)
        : truth_(std::move(truth)), horizon_(horizon) {
        if (truth_.n_vars < 1) throw contract_error("SeparationOracle: empty graph");
        if (horizon_ < 10) throw contract_error("SeparationOracle: horizon too small");
        parents_of_.resize(size_t(truth_.n_vars));
        children_of_.resize(size_t(truth_.n_vars));
        for (const auto& [source, lag, target] : truth_.links) {
            parents_of_[size_t(target)].push_back({source, lag});
            children_of_[size_t(source)].push_back({target, lag});
        }
    }

    std::string name() const override { return "oracle"; }

    CITestOutcome run(const TimeSeriesDataset&, LaggedVariable x, LaggedVariable y,
                      const std::vector<LaggedVariable>& conds, int) const override {
        const bool connected = d_connected(x, y, conds);
        CITestOutcome out;
        out.statistic = connected ? 1.0 : 0.0;
        out.p_value = connected ? 0.0 : 1.0;
        out.dof_or_n = 0;
        return out;
    }

    bool d_connected(LaggedVariable x, LaggedVariable y,
                     const std::vector<LaggedVariable>& conds) const {
        const int nv = truth_.n_vars;
        const int H = horizon_;
        auto node_ok = [&](int var, int off) { return var >= 0 && var < nv && off >= 0 && off <= H; };
        if (!node_ok(x.var_index, x.lag) || !node_ok(y.var_index, y.lag))
            throw contract_error("SeparationOracle: query node outside the unrolled frame");
        if (x == y) return true;
        std::vector<char> in_z(size_t(nv) * size_t(H + 1), 0);
        for (auto c : conds) {
            if (!node_ok(c.var_index, c.lag))
                throw contract_error("SeparationOracle: condition outside the unrolled frame");
            if (c == x || c == y) return false;  // conditioning fixes an endpoint
            in_z[id(c.var_index, c.lag)] = 1;
        }

        // ancestors of the conditioning set: a collider lets the trail pass
        // exactly when it lies in this set (it is conditioned or has a
        // conditioned descendant)
        std::vector<char> anc(size_t(nv) * size_t(H + 1), 0);
        {
            std::deque<LaggedVariable> up;
            for (auto c : conds) {
                if (!anc[id(c.var_index, c.lag)]) {
                    anc[id(c.var_index, c.lag)] = 1;
                    up.push_back(c);
                }
            }
            while (!up.empty()) {
                const LaggedVariable node = up.front();
                up.pop_front();
                for (auto [pv, plag] : parents_of_[size_t(node.var_index)]) {
                    const int off = node.lag + plag;
                    if (off > H) continue;
                    if (!anc[id(pv, off)]) {
                        anc[id(pv, off)] = 1;
                        up.push_back({pv, off});
                    }
                }
            }
        }

        // direction 0: ball arrived from a child, 1: from a parent
        std::vector<char> visited(2 * size_t(nv) * size_t(H + 1), 0);
        std::deque<std::pair<LaggedVariable, int>> queue;
        auto push = [&](int var, int off, int dir) {
            if (off < 0 || off > H) return;
            const std::size_t key = size_t(dir) * size_t(nv) * size_t(H + 1) + id(var, off);
            if (visited[key]) return;
            visited[key] = 1;
            queue.push_back({{var, off}, dir});
        };
        push(x.var_index, x.lag, 0);
        while (!queue.empty()) {
            const auto [node, dir] = queue.front();
            queue.pop_front();
            if (node == y) return true;
            const bool conditioned = in_z[id(node.var_index, node.lag)] != 0;
            if (dir == 0) {  // from child: pass through unless conditioned
                if (!conditioned) {
                    for (auto [pv, plag] : parents_of_[size_t(node.var_index)])
                        push(pv, node.lag + plag, 0);
                    for (auto [cv, clag] : children_of_[size_t(node.var_index)])
                        push(cv, node.lag - clag, 1);
                }
            } else {  // from parent: chains need the node free, colliders need
                       // a conditioned descendant
                if (!conditioned)
                    for (auto [cv, clag] : children_of_[size_t(node.var_index)])
                        push(cv, node.lag - clag, 1);
                if (anc[id(node.var_index, node.lag)])
                    for (auto [pv, plag] : parents_of_[size_t(node.var_index)])
                        push(pv, node.lag + plag, 0);
            }
        }
        return false;
    }

private:
    std::size_t id(int var, int off) const {
        return size_t(off) * size_t(truth_.n_vars) + size_t(var);
    }

    GroundTruthGraph truth_;
    int horizon_;
    std::vector<std::vector<std::pair<int, int>>> parents_of_;   // (source, lag) into var
    std::vector<std::vector<std::pair<int, int>>> children_of_;  // (target, lag) out of var
};

}  // namespace tscausal
