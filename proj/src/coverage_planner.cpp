#include "parkbot/coverage_planner.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "parkbot/errors.hpp"

namespace parkbot {

GridMap GridMap::from_cells(const LocalPoint& origin, double cell_size, const BoolGrid& free) {
    GridMap grid;
    grid.origin = origin;
    grid.cell_size = cell_size;
    grid.nx = static_cast<int>(free.rows());
    grid.ny = static_cast<int>(free.cols());
    grid.free = free;
    const int mx = (grid.nx + 1) / 2;
    const int my = (grid.ny + 1) / 2;
    grid.mega_free = BoolGrid::Constant(mx, my, false);
    for (int I = 0; I < mx; ++I) {
        for (int J = 0; J < my; ++J) {
            bool all = true;
            for (int di = 0; di < 2; ++di)
                for (int dj = 0; dj < 2; ++dj) all = all && grid.is_free({2 * I + di, 2 * J + dj});
            grid.mega_free(I, J) = all;
        }
    }
    return grid;
}

CellIndex GridMap::cell_of(const LocalPoint& p) const {
    const LocalPoint rel = (p - origin) / cell_size;
    return {static_cast<int>(std::floor(rel.x())), static_cast<int>(std::floor(rel.y()))};
}

GridMap rasterize_field(const LocalPolygon& boundary, std::span<const LocalPolygon> obstacles,
                        double cell_size) {
    const LocalPoint lo = boundary.rowwise().minCoeff();
    const LocalPoint hi = boundary.rowwise().maxCoeff();
    const LocalPoint extent = (hi - lo) / cell_size;
    const int nx = std::max(1, static_cast<int>(std::ceil(extent.x() - 1e-6)));
    const int ny = std::max(1, static_cast<int>(std::ceil(extent.y() - 1e-6)));

    BoolGrid free(nx, ny);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const LocalPoint cmin = lo + cell_size * LocalPoint(i, j);
            bool ok = cell_inside(boundary, cmin, cell_size);
            for (const auto& obstacle : obstacles) {
                if (!ok) break;
                ok = !polygon_overlaps_cell(obstacle, cmin, cell_size);
            }
            free(i, j) = ok;
        }
    }
    GridMap grid = GridMap::from_cells(lo, cell_size, free);
    if (grid.free_megacell_count() == 0) throw EmptyField();
    return grid;
}

MegacellGraph build_megacell_graph(const GridMap& grid) {
    MegacellGraph graph;
    graph.node_id = Eigen::ArrayXXi::Constant(grid.mx(), grid.my(), -1);
    for (int J = 0; J < grid.my(); ++J) {
        for (int I = 0; I < grid.mx(); ++I) {
            if (!grid.mega_free(I, J)) continue;
            graph.node_id(I, J) = static_cast<int>(graph.nodes.size());
            graph.nodes.push_back({I, J});
        }
    }
    for (const CellIndex& m : graph.nodes) {
        for (Direction d : {Direction::East, Direction::North}) {
            const CellIndex n = step(m, d);
            if (grid.is_mega_free(n)) graph.edges.emplace_back(m, n);
        }
    }
    return graph;
}

bool SpanningTree::has_edge(CellIndex a, CellIndex b) const {
    if (auto it = parent.find(a); it != parent.end() && it->second == b) return true;
    if (auto it = parent.find(b); it != parent.end() && it->second == a) return true;
    return false;
}

SpanningTree spanning_tree(const MegacellGraph& graph, CellIndex start) {
    if (!graph.contains(start))
        throw StartBlocked(fmt::format("megacell ({}, {}) is not free", start.i, start.j));

    SpanningTree tree;
    tree.root = start;
    tree.parent.emplace(start, std::nullopt);

    // Explicit stack emulating recursive DFS: (node, next neighbor slot).
    std::vector<std::pair<CellIndex, int>> stack{{start, 0}};
    while (!stack.empty()) {
        auto& [node, slot] = stack.back();
        if (slot == 4) {
            stack.pop_back();
            continue;
        }
        const CellIndex next = step(node, kNeighborOrder[slot++]);
        if (graph.contains(next) && !tree.contains(next)) {
            tree.parent.emplace(next, node);
            stack.emplace_back(next, 0);
        }
    }
    return tree;
}

namespace {

// Sub-cell successor when circumnavigating the tree with it on the right.
// Each quadrant owns one megacell side; it crosses that side when a tree edge
// leaves through it and otherwise turns clockwise inside the megacell.
Direction successor_direction(const SpanningTree& tree, CellIndex cell) {
    const CellIndex mega = GridMap::megacell_of(cell);
    const bool east_half = cell.i & 1;
    const bool north_half = cell.j & 1;
    Direction side, turn;
    if (!east_half && north_half) {
        side = Direction::North, turn = Direction::East;
    } else if (east_half && north_half) {
        side = Direction::East, turn = Direction::South;
    } else if (east_half && !north_half) {
        side = Direction::South, turn = Direction::West;
    } else {
        side = Direction::West, turn = Direction::North;
    }
    return tree.has_edge(mega, step(mega, side)) ? side : turn;
}

}  // namespace

CoveragePath generate_coverage_path(const GridMap& grid, const SpanningTree& tree, CellIndex start_cell) {
    if (!grid.is_free(start_cell) || !tree.contains(GridMap::megacell_of(start_cell)))
        throw StartBlocked(fmt::format("unit cell ({}, {}) is not in a tree megacell", start_cell.i, start_cell.j));

    CoveragePath path;
    path.cell_size = grid.cell_size;
    const std::size_t expected = 4 * tree.node_count();
    path.cells.reserve(expected);
    path.waypoints.reserve(expected);

    CellIndex cell = start_cell;
    do {
        path.cells.push_back(cell);
        path.waypoints.push_back(grid.cell_center(cell));
        cell = step(cell, successor_direction(tree, cell));
        if (path.cells.size() > expected) throw std::logic_error("coverage circuit failed to close");
    } while (cell != start_cell);

    if (path.cells.size() != expected) throw std::logic_error("coverage circuit skipped tree cells");
    return path;
}

CoveragePlan plan_coverage(const LocalPolygon& boundary, std::span<const LocalPolygon> obstacles,
                           const LocalPoint& start, double cell_size) {
    CoveragePlan plan;
    plan.grid = rasterize_field(boundary, obstacles, cell_size);
    plan.graph = build_megacell_graph(plan.grid);
    plan.start_cell = plan.grid.cell_of(start);
    if (!plan.grid.in_grid(plan.start_cell))
        throw StartBlocked("start lies outside the field raster");
    plan.tree = spanning_tree(plan.graph, GridMap::megacell_of(plan.start_cell));
    plan.path = generate_coverage_path(plan.grid, plan.tree, plan.start_cell);
    plan.uncovered_free_cells = plan.grid.free_cell_count() - static_cast<int>(plan.path.cells.size());
    plan.unreachable_megacells =
        static_cast<int>(plan.graph.nodes.size()) - static_cast<int>(plan.tree.node_count());
    return plan;
}

void write_path_csv(std::ostream& out, const CoveragePath& path, const LocalFrame& frame) {
    out << "index,x_m,y_m,lat_deg,lon_deg\n";
    for (std::size_t k = 0; k < path.waypoints.size(); ++k) {
        const LocalPoint& p = path.waypoints[k];
        const GeoPoint g = local_to_geo(frame, p);
        out << fmt::format("{},{:.4f},{:.4f},{:.9f},{:.9f}\n", k, p.x(), p.y(), g.lat, g.lon);
    }
}

}  // namespace parkbot
