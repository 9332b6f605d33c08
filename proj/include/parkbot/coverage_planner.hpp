#pragma once
//
// Spanning Tree Coverage over a 2x2 megacell decomposition of the field.
//
// The field is rasterized into square unit cells (the detection-zone size),
// unit cells are grouped into 2x2 megacells, a depth-first spanning tree is
// grown over the free megacells and the coverage cycle is obtained by walking
// around the tree with its edges kept on the right-hand side. Every unit cell
// of every tree megacell is visited exactly once.
//

#include <compare>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "parkbot/geo_frame.hpp"

namespace parkbot {

inline constexpr double kDefaultCellSize = 0.3;

// Integer (column, row) index; j grows northwards.
struct CellIndex {
    int i = 0;
    int j = 0;
    auto operator<=>(const CellIndex&) const = default;
};

enum class Direction { North, East, South, West };

inline constexpr Direction kNeighborOrder[4] = {Direction::North, Direction::East, Direction::South,
                                                Direction::West};

inline CellIndex step(CellIndex c, Direction d) {
    switch (d) {
        case Direction::North: return {c.i, c.j + 1};
        case Direction::East: return {c.i + 1, c.j};
        case Direction::South: return {c.i, c.j - 1};
        case Direction::West: return {c.i - 1, c.j};
    }
    return c;
}

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct GridMap {
    LocalPoint origin = LocalPoint::Zero();  // min corner of cell (0, 0)
    double cell_size = kDefaultCellSize;
    int nx = 0;
    int ny = 0;
    BoolGrid free;       // nx x ny
    BoolGrid mega_free;  // ceil(nx/2) x ceil(ny/2)

    // Builds the megacell raster from a unit-cell raster.
    static GridMap from_cells(const LocalPoint& origin, double cell_size, const BoolGrid& free);

    int mx() const { return static_cast<int>(mega_free.rows()); }
    int my() const { return static_cast<int>(mega_free.cols()); }

    bool in_grid(CellIndex c) const { return c.i >= 0 && c.j >= 0 && c.i < nx && c.j < ny; }
    bool in_mega_grid(CellIndex m) const { return m.i >= 0 && m.j >= 0 && m.i < mx() && m.j < my(); }
    bool is_free(CellIndex c) const { return in_grid(c) && free(c.i, c.j); }
    bool is_mega_free(CellIndex m) const { return in_mega_grid(m) && mega_free(m.i, m.j); }

    LocalPoint cell_min(CellIndex c) const {
        return origin + cell_size * LocalPoint(c.i, c.j);
    }
    LocalPoint cell_center(CellIndex c) const {
        return origin + cell_size * LocalPoint(c.i + 0.5, c.j + 0.5);
    }
    // Unit cell containing p (may lie outside the grid).
    CellIndex cell_of(const LocalPoint& p) const;

    static CellIndex megacell_of(CellIndex c) { return {c.i >> 1, c.j >> 1}; }

    int free_cell_count() const { return static_cast<int>(free.count()); }
    int free_megacell_count() const { return static_cast<int>(mega_free.count()); }
};

// Throws EmptyField when no megacell is free.
GridMap rasterize_field(const LocalPolygon& boundary, std::span<const LocalPolygon> obstacles,
                        double cell_size = kDefaultCellSize);

struct MegacellGraph {
    std::vector<CellIndex> nodes;                         // row-major scan order
    std::vector<std::pair<CellIndex, CellIndex>> edges;  // each undirected edge once
    Eigen::ArrayXXi node_id;                              // -1 where not a node

    bool contains(CellIndex m) const {
        return m.i >= 0 && m.j >= 0 && m.i < node_id.rows() && m.j < node_id.cols() &&
               node_id(m.i, m.j) >= 0;
    }
};

MegacellGraph build_megacell_graph(const GridMap& grid);

struct SpanningTree {
    CellIndex root;
    std::map<CellIndex, std::optional<CellIndex>> parent;  // root maps to nullopt

    bool contains(CellIndex m) const { return parent.contains(m); }
    std::size_t node_count() const { return parent.size(); }
    std::size_t edge_count() const { return parent.empty() ? 0 : parent.size() - 1; }
    bool has_edge(CellIndex a, CellIndex b) const;
};

// Depth-first tree of the component containing `start`, neighbors tried in
// N, E, S, W order. Throws StartBlocked when start is not a node.
SpanningTree spanning_tree(const MegacellGraph& graph, CellIndex start);

struct CoveragePath {
    std::vector<LocalPoint> waypoints;  // unit-cell centers
    std::vector<CellIndex> cells;       // matching unit-cell indices
    double cell_size = kDefaultCellSize;
    bool closed = true;
};

// Throws StartBlocked when start_cell's megacell is not in the tree.
CoveragePath generate_coverage_path(const GridMap& grid, const SpanningTree& tree, CellIndex start_cell);

// Closed-cycle length: one cell step per waypoint.
inline double path_length(const CoveragePath& path) {
    return static_cast<double>(path.waypoints.size()) * path.cell_size;
}

struct CoveragePlan {
    GridMap grid;
    MegacellGraph graph;
    SpanningTree tree;
    CoveragePath path;
    CellIndex start_cell;
    // Free unit cells not covered: cells of megacells outside the start
    // component plus free cells of partially blocked megacells.
    int uncovered_free_cells = 0;
    int unreachable_megacells = 0;
};

CoveragePlan plan_coverage(const LocalPolygon& boundary, std::span<const LocalPolygon> obstacles,
                           const LocalPoint& start, double cell_size = kDefaultCellSize);

// CSV with header `index,x_m,y_m,lat_deg,lon_deg`.
void write_path_csv(std::ostream& out, const CoveragePath& path, const LocalFrame& frame);

}  // namespace parkbot
