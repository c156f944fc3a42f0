#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "uvlc/rng.hpp"
#include "uvlc/scenario.hpp"

namespace uvlc {

struct DetectedPhoton {
  double t;       // arrival time at the receiver plane, s
  double x, y;    // landing point in the plane, m
  double zenith;  // arrival angle w.r.t. the plane normal, rad
  double weight;  // surviving packet weight, >= weight threshold
};

// One unique (transverse offset, aperture radius) selection disc. Links that
// share the same relative geometry share a class, so the plane is traced once
// per scenario rather than once per (tx, rx) pair.
struct ReceiverClass {
  double cx = 0.0;     // disc center along the array axis, m
  double radius = 0.0; // disc radius, m
};

struct ReceiverGeometry {
  std::vector<ReceiverClass> classes;
  // link_class(i, j) indexes `classes` for transmitter i, receiver j.
  Eigen::MatrixXi link_class;
};

ReceiverGeometry receiver_geometry(const Scenario& s);

// ---- Sampling primitives (unit-testable pieces of the tracer) ----

// Launch zenith of a collimated beam with Rayleigh-distributed divergence.
double sample_collimated_zenith(double theta_div, double u);

// Launch zenith of a generalized Lambertian of order m.
double sample_lambertian_zenith(double m, double u);

// Henyey-Greenstein cosine via the closed-form inverse CDF.
double sample_hg_costheta(double g, double u);

// Deflect `dir` by (acos(cos_theta), phi) in the frame of `dir`.
Eigen::Vector3d rotate_direction(const Eigen::Vector3d& dir, double cos_theta,
                                 double phi);

struct LaunchState {
  Eigen::Vector3d position;
  Eigen::Vector3d direction;
};

LaunchState launch_photon(const SourceModel& source, RandomStream& rng);

// ---- Tracer ----

struct TraceOptions {
  // Record every field-of-view-passing plane crossing within capture_radius
  // of the axis (for spatial maps and re-binning). 0 disables collection.
  double capture_radius = 0.0;
  int threads = 0; // 0 = hardware concurrency
};

struct TraceResult {
  ReceiverGeometry geometry;
  std::vector<std::vector<DetectedPhoton>> per_class; // photon-index order
  std::vector<DetectedPhoton> capture;                // capture-disc crossings
  uint64_t launched = 0;
  uint64_t crossing_count = 0;  // all plane crossings, any radius
  double crossing_weight = 0.0; // their weight sum
};

TraceResult trace_photons(const Scenario& s, const TraceOptions& opt = {});

// ---- Raw photon dump ----

struct PhotonDumpHeader {
  uint64_t scenario_hash = 0;
  uint64_t seed = 0;
  uint64_t photon_count = 0;
  double capture_radius = 0.0;
  uint64_t record_count = 0;
};

void write_photon_dump(const std::string& path, const PhotonDumpHeader& h,
                       const std::vector<DetectedPhoton>& records);

// Throws std::runtime_error on a malformed file.
PhotonDumpHeader read_photon_dump(const std::string& path,
                                  std::vector<DetectedPhoton>& records);

} // namespace uvlc
