// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#include "slotnoc/evolutionary.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace slotnoc::ea {

Fitness evaluate(const Context &ctx, const Genome &genome) {
    const std::vector<NodeId> path = loop_erase(expand_intermediates(ctx.src, ctx.dst, genome));
    Fitness f;
    f.length = static_cast<int>(path.size()) - 1;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const Slot load = ctx.loads->at(ctx.mesh->channel_index(ChannelId::link(path[i - 1], path[i]))) + ctx.flits;
        if (ctx.kind == FitnessKind::MaxLoad) {
            f.load = std::max(f.load, load);
        } else {
            f.load += load;
        }
    }
    return f;
}

std::vector<Fitness> evaluate_population_serial(const Context &ctx, std::span<const Genome> population) {
    std::vector<Fitness> out(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) out[i] = evaluate(ctx, population[i]);
    return out;
}

std::vector<Fitness> evaluate_population(const Context &ctx, std::span<const Genome> population) {
    std::vector<Fitness> out(population.size());
    const long n = static_cast<long>(population.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out[i] = evaluate(ctx, population[i]);
    return out;
}

std::vector<NodeId> candidate_nodes(const MeshTopology &mesh, NodeId src, NodeId dst) {
    const int x0 = std::max(0, std::min(src.x, dst.x) - 1);
    const int x1 = std::min(mesh.width() - 1, std::max(src.x, dst.x) + 1);
    const int y0 = std::max(0, std::min(src.y, dst.y) - 1);
    const int y1 = std::min(mesh.height() - 1, std::max(src.y, dst.y) + 1);
    std::vector<NodeId> out;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) out.push_back({x, y});
    }
    return out;
}

namespace {

class Breeder {
   public:
    Breeder(const EaParams &params, std::vector<NodeId> candidates, std::uint64_t seed)
        : params_(params), candidates_(std::move(candidates)), rng_(seed) {}

    Genome random_genome() {
        Genome g(uniform(0, params_.max_intermediate_nodes));
        for (NodeId &n : g) n = random_node();
        return g;
    }

    std::size_t tournament(const std::vector<Fitness> &fit) {
        const std::size_t a = uniform(0, static_cast<int>(fit.size()) - 1);
        const std::size_t b = uniform(0, static_cast<int>(fit.size()) - 1);
        return better(fit, a, b) ? a : b;
    }

    Genome crossover(const Genome &a, const Genome &b) {
        const int cut_a = uniform(0, static_cast<int>(a.size()));
        const int cut_b = uniform(0, static_cast<int>(b.size()));
        Genome child(a.begin(), a.begin() + cut_a);
        child.insert(child.end(), b.begin() + cut_b, b.end());
        if (static_cast<int>(child.size()) > params_.max_intermediate_nodes) {
            child.resize(params_.max_intermediate_nodes);
        }
        return child;
    }

    void mutate(Genome &g) {
        for (NodeId &n : g) {
            if (chance()) n = random_node();
        }
        if (chance() && static_cast<int>(g.size()) < params_.max_intermediate_nodes) {
            g.insert(g.begin() + uniform(0, static_cast<int>(g.size())), random_node());
        }
        if (chance() && !g.empty()) g.erase(g.begin() + uniform(0, static_cast<int>(g.size()) - 1));
    }

    static bool better(const std::vector<Fitness> &fit, std::size_t a, std::size_t b) {
        return fit[a] < fit[b] || (fit[a] == fit[b] && a < b);
    }

   private:
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < params_.mutation_rate; }
    NodeId random_node() { return candidates_[uniform(0, static_cast<int>(candidates_.size()) - 1)]; }

    const EaParams &params_;
    std::vector<NodeId> candidates_;
    std::mt19937_64 rng_;
};

std::size_t best_index(const std::vector<Fitness> &fit) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < fit.size(); ++i) {
        if (Breeder::better(fit, i, best)) best = i;
    }
    return best;
}

}  // namespace

SearchResult search(const Context &ctx, const EaParams &params, std::uint64_t seed, bool parallel) {
    params.validate();
    auto eval = [&](const std::vector<Genome> &pop) {
        return parallel ? evaluate_population(ctx, pop) : evaluate_population_serial(ctx, pop);
    };

    if (params.max_intermediate_nodes == 0 || ctx.src == ctx.dst) {
        SearchResult r;
        r.fitness = evaluate(ctx, r.best);
        r.path = loop_erase(expand_intermediates(ctx.src, ctx.dst, r.best));
        return r;
    }

    Breeder breeder(params, candidate_nodes(*ctx.mesh, ctx.src, ctx.dst), seed);
    // Slot 0 always holds the plain X-Y genome, so the result is never worse.
    std::vector<Genome> population(static_cast<std::size_t>(params.population_size));
    for (std::size_t i = 1; i < population.size(); ++i) population[i] = breeder.random_genome();

    for (int gen = 0; gen < params.generations; ++gen) {
        const std::vector<Fitness> fit = eval(population);
        std::vector<Genome> next;
        next.reserve(population.size());
        next.push_back(population[best_index(fit)]);
        while (next.size() < population.size()) {
            const Genome &a = population[breeder.tournament(fit)];
            const Genome &b = population[breeder.tournament(fit)];
            Genome child = breeder.crossover(a, b);
            breeder.mutate(child);
            next.push_back(std::move(child));
        }
        population = std::move(next);
    }

    const std::vector<Fitness> fit = eval(population);
    const std::size_t best = best_index(fit);
    SearchResult r{population[best], fit[best], {}};
    r.path = loop_erase(expand_intermediates(ctx.src, ctx.dst, r.best));
    return r;
}

}  // namespace slotnoc::ea
