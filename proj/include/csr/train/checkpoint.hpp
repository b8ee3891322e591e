#pragma once

#include <filesystem>

#include "csr/kv_config.hpp"
#include "csr/model/config.hpp"
#include "csr/model/model.hpp"

namespace csr::train {

using diffnum::Tape;
using diffnum::Tensor;

// Checkpoint directory layout:
//
//   manifest.txt   key=value lines (see README for the grammar)
//   p<i>.bin       parameter i as little-endian IEEE-754 float64, row-major
//
// The manifest holds the model config, the optimizer step and, for each
// parameter, `param.<i>=<name> <d0>x<d1> p<i>.bin`.
void save_checkpoint(const model::Model& model, const std::filesystem::path& dir);
model::Model load_checkpoint(const std::filesystem::path& dir);

// Model config read from a manifest without loading the weights.
model::ModelConfig read_checkpoint_config(const std::filesystem::path& dir);

KeyValues model_config_to_kv(const model::ModelConfig& config);
// Consumes the model keys of `reader`; other keys are left for the caller.
model::ModelConfig model_config_from(KeyReader& reader, const model::ModelConfig& defaults);

}  // namespace csr::train
