#pragma once

// Directed graphs over dense vertex ids and Tarjan's SCC algorithm, with an
// implicit-successor variant for product shallow digraphs whose edge sets are
// too large to materialize.

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace wta {

struct Digraph {
    std::size_t num_vertices = 0;
    std::vector<std::vector<std::int64_t>> adj;

    explicit Digraph(std::size_t n = 0) : num_vertices(n), adj(n) {}

    void add_edge(std::int64_t from, std::int64_t to) {
        adj[static_cast<std::size_t>(from)].push_back(to);
    }
};

struct SccResult {
    std::size_t count = 0;
    // Component ids in reverse topological order: if component X has an edge
    // to component Y then id(Y) < id(X).
    std::vector<std::int32_t> comp;

    bool same_component(std::int64_t a, std::int64_t b) const {
        return comp[static_cast<std::size_t>(a)] == comp[static_cast<std::size_t>(b)];
    }
};

/// Iterative Tarjan over an implicitly given graph.  `successors(v, out)`
/// fills `out` with the successors of v (duplicates allowed; out is cleared
/// by the callee).  Deterministic: vertices are rooted in increasing id
/// order.  Successor lists of the active DFS path live in one shared arena
/// so deep product graphs do not allocate per vertex.
template <typename SuccFn>
inline SccResult scc_implicit(std::int64_t num_vertices, SuccFn&& successors) {
    constexpr std::int32_t kUnvisited = -1;
    // Finished vertices keep this sentinel so the lowlink update below is a
    // plain min: it can never lower a live lowlink past a dead component.
    constexpr std::int32_t kDone = std::numeric_limits<std::int32_t>::max();
    std::size_t n = static_cast<std::size_t>(num_vertices);
    SccResult result;
    result.comp.assign(n, kUnvisited);

    std::vector<std::int32_t> index(n, kUnvisited);
    std::vector<std::int64_t> stack;
    std::int32_t next_index = 0;

    struct Frame {
        std::int64_t v;
        std::size_t next_child;  // arena index of the next successor
        std::size_t succ_end;    // arena index one past this frame's successors
        std::int32_t low;        // lowlink of v, kept on the frame
    };
    std::vector<Frame> frames;
    std::vector<std::int64_t> arena;
    std::vector<std::int64_t> scratch;

    auto push_frame = [&](std::int64_t v) {
        index[static_cast<std::size_t>(v)] = next_index;
        stack.push_back(v);
        std::size_t begin = arena.size();
        successors(v, scratch);
        arena.insert(arena.end(), scratch.begin(), scratch.end());
        frames.push_back(Frame{v, begin, arena.size(), next_index});
        ++next_index;
    };

    for (std::int64_t root = 0; root < num_vertices; ++root) {
        if (index[static_cast<std::size_t>(root)] != kUnvisited) continue;
        push_frame(root);

        while (!frames.empty()) {
            Frame& f = frames.back();
            std::int64_t child = -1;
            while (f.next_child < f.succ_end) {
                std::int64_t w = arena[f.next_child++];
                std::int32_t iw = index[static_cast<std::size_t>(w)];
                if (iw == kUnvisited) {
                    child = w;
                    break;
                }
                if (iw < f.low) f.low = iw;
            }
            if (child >= 0) {
                push_frame(child);
                continue;
            }
            std::int32_t low = f.low;
            std::int64_t v = f.v;
            if (low == index[static_cast<std::size_t>(v)]) {
                std::int32_t cid = static_cast<std::int32_t>(result.count++);
                while (true) {
                    std::int64_t w = stack.back();
                    stack.pop_back();
                    index[static_cast<std::size_t>(w)] = kDone;
                    result.comp[static_cast<std::size_t>(w)] = cid;
                    if (w == v) break;
                }
            }
            frames.pop_back();
            arena.resize(frames.empty() ? 0 : frames.back().succ_end);
            if (!frames.empty() && low < frames.back().low) frames.back().low = low;
        }
    }
    return result;
}

inline SccResult scc(const Digraph& g) {
    return scc_implicit(static_cast<std::int64_t>(g.num_vertices),
                        [&g](std::int64_t v, std::vector<std::int64_t>& out) {
                            out = g.adj[static_cast<std::size_t>(v)];
                        });
}

}  // namespace wta
