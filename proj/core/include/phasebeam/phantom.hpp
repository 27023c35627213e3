#pragma once

// Synthetic single-material specimens for simulation and testing.

#include <cstddef>
#include <vector>

#include "phasebeam/core.hpp"

namespace phasebeam::phantom {

/// Cylinder parallel to the rotation (y) axis. Positions and lengths are in
/// voxels, x and z measured from the volume centre.
struct Cylinder {
  double center_x = 0.0;
  double center_z = 0.0;
  double radius = 1.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double density = 0.0;     // nuclei / m^3
  double edge_width = 0.0;  // cosine taper width; 0 gives a hard edge
};

/// Sum of cylinders. Hard-edged cylinders use supersample^2 sub-voxel
/// coverage in the xz plane; tapered ones are sampled at voxel centres.
Volume3D cylinders(std::size_t nx, std::size_t ny, std::size_t nz, double voxel_pitch,
                   const std::vector<Cylinder>& parts, std::size_t supersample = 4);

/// The two-cylinder desk phantom: a dense cylinder and a half-density one,
/// tapered edges, finite height. Scaled to an n^3 grid.
std::vector<Cylinder> two_cylinder_layout(std::size_t n, double density);
Volume3D two_cylinder(std::size_t n, double voxel_pitch, double density);

struct RoiPair {
  Roi signal;
  Roi background;
};

/// Signal box inside the dense cylinder and an empty background box, on an
/// n x n axial slice (x across, z down) of the two-cylinder phantom.
RoiPair two_cylinder_slice_rois(std::size_t n);
/// Same idea on the phi = 0 projection (x across, y down); the background band
/// runs across the image above both caps.
RoiPair two_cylinder_projection_rois(std::size_t n);

/// Single voxel of the given density at (ix, iy, iz).
Volume3D point(std::size_t nx, std::size_t ny, std::size_t nz, double voxel_pitch,
               std::size_t ix, std::size_t iy, std::size_t iz, double density);

struct Blob {
  double center_x = 0.0;  // voxels from centre
  double center_y = 0.0;
  double center_z = 0.0;
  double width = 1.0;     // Gaussian standard deviation, voxels
  double density = 0.0;
};

/// Sum of isotropic Gaussians (band-limited test objects).
Volume3D gaussian_blobs(std::size_t nx, std::size_t ny, std::size_t nz, double voxel_pitch,
                        const std::vector<Blob>& blobs);

}  // namespace phasebeam::phantom
