// Copyright 2026 The qconvsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qconvsim/nelder_mead.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace qconvsim {

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd &)> &f, const Eigen::VectorXd &start,
                          const SimplexOptions &opts) {
    const Eigen::Index n = start.size();
    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), start);
    std::vector<double> vals(static_cast<std::size_t>(n + 1));
    SimplexResult res;

    auto eval = [&](const Eigen::VectorXd &x) {
        ++res.evaluations;
        double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    for (Eigen::Index i = 0; i < n; ++i) {
        double step = start(i) != 0.0 ? opts.initial_step * std::max(1.0, std::abs(start(i))) : opts.initial_step;
        pts[static_cast<std::size_t>(i + 1)](i) += step;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        vals[i] = eval(pts[i]);
    }

    std::vector<std::size_t> order(pts.size());
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];

        if (vals[worst] - vals[best] < opts.f_tol) {
            res.converged = true;
            break;
        }
        if (res.evaluations >= opts.max_evaluations) {
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i != worst) {
                centroid += pts[i];
            }
        }
        centroid /= static_cast<double>(n);

        Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
        double fr = eval(reflected);
        if (fr < vals[best]) {
            Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
            double fe = eval(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
            continue;
        }
        // Contraction, outside if the reflection improved on the worst point.
        bool outside = fr < vals[worst];
        Eigen::VectorXd contracted =
            outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                    : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        double fc = eval(contracted);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == best) {
                continue;
            }
            pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
            vals[i] = eval(pts[i]);
        }
    }

    auto best_it = std::min_element(vals.begin(), vals.end());
    res.value = *best_it;
    res.x = pts[static_cast<std::size_t>(best_it - vals.begin())];
    return res;
}

}  // namespace qconvsim
