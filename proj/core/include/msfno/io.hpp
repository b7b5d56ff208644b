#pragma once

#include <string>
#include <vector>

#include "msfno/datagen.hpp"
#include "msfno/model.hpp"
#include "msfno/training.hpp"

namespace msfno {

// All binary files are little-endian f64 with an 8-byte magic header.
// Each artifact is a JSON manifest (<prefix>.json) plus a blob (<prefix>.bin).

/// Writes <prefix>.json and <prefix>.bin (inputs block then targets block).
void write_dataset(const std::string& prefix, const BuiltDataset& ds);
BuiltDataset read_dataset(const std::string& prefix);

/// Checkpoint: manifest with config, seed, and a parameter-section table
/// (names/shapes/dtypes/f64 offsets); blob in stable enumeration order.
void write_checkpoint(const std::string& prefix, const Model& model, std::uint64_t seed);
Model read_checkpoint(const std::string& prefix);

/// Header: epoch,train_loss,val_err,test_err,seconds
void write_metrics_csv(const std::string& path, const std::vector<EpochRecord>& records);

/// Magnitudes of the floor(n/2)+1 nonnegative-frequency DFT modes of a
/// real signal (unnormalized forward transform).
std::vector<double> dft_magnitudes(const Tensor& signal);

/// Columns of equal length, modes ascending from 0.
struct SpectrumReport {
    std::vector<std::string> columns;             // e.g. mode,target,prediction,branch_0...
    std::vector<std::vector<double>> values;      // one vector per column
};

void write_spectrum_csv(const std::string& path, const SpectrumReport& report);

/// Round-trip shortest representation of a double (locale-independent).
std::string format_double(double v);

}  // namespace msfno
