#pragma once

#include "fairprune/dataset.hpp"
#include "fairprune/metrics.hpp"
#include "fairprune/mlp.hpp"

namespace fairprune {

FairnessReport evaluate_model(const Mlp& model, const GroupedDataset& dataset,
                              EoddVariant variant = EoddVariant::kSignedSum);

}  // namespace fairprune
