#pragma once

#include <filesystem>
#include <string>

#include "fwi/driver.hpp"

namespace fwi {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ModelKind { velocity_mps, slowness_sq };

// On disk: one text header line
//   fwi-model nx=<int> nz=<int> h=<float> n_pml=<int> kind=<velocity_mps|slowness_sq>
// followed by exactly nx*nz little-endian float64 values, row-major with x
// fastest.
struct ModelFile {
    Grid2D grid;
    ModelKind kind = ModelKind::velocity_mps;
    RealVector values;

    SlownessModel to_slowness() const;  // internal state is always squared slowness
    double mean_velocity() const;
};

ModelFile read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const ModelFile& m);

// Structured text survey:
//   fwi-survey
//   frequencies_hz <f> <f> ...
//   weight_mode identity|offset
//   source <ix> <iz> [amplitude]
//   receivers <ix> <iz> <ix> <iz> ...
Survey read_survey(const std::filesystem::path& path);
void write_survey(const std::filesystem::path& path, const Survey& survey);

// CSV data: frequency_hz,source_index,receiver_index,node_x,node_z,real,imag
// in canonical order (frequency blocks in survey order, source-major).
std::vector<DataVector> read_data(const std::filesystem::path& path, const Survey& survey);
void write_data(const std::filesystem::path& path, const Survey& survey,
                const std::vector<DataVector>& blocks);

// key = value configuration text; '#' starts a comment.
FwiConfig read_config(const std::filesystem::path& path);

// Binary P6 raster of the core-region values with a fixed blue-white-red
// colormap, min-max scaled; the scale endpoints go to a .txt sidecar next to
// the image.
void write_heatmap(const std::filesystem::path& ppm_path, const Grid2D& grid,
                   const RealVector& node_values);

// Model generators (velocities in m/s).
ModelFile make_layered_model(const Grid2D& grid, const std::vector<double>& velocities,
                             const std::vector<int>& interfaces);
ModelFile make_lens_model(const Grid2D& grid, double background_mps, double amplitude_mps,
                          double center_ix, double center_iz, double radius_nodes);
// Wraps a headerless little-endian float32 velocity grid, converting to the
// requested kind.
ModelFile import_raw_model(const Grid2D& grid, const std::filesystem::path& raw_path,
                           ModelKind out_kind);

// Write-temp-then-rename text/binary emission.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string format_double(double v);  // shortest exact round-trip decimal

}  // namespace fwi
