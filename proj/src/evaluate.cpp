#include "fairprune/evaluate.hpp"

namespace fairprune {

FairnessReport evaluate_model(const Mlp& model, const GroupedDataset& dataset,
                              EoddVariant variant) {
  const Batch batch = dataset.to_batch();
  const std::vector<int> preds = model.predict(batch);
  return make_report(preds, batch.labels, batch.groups, dataset.num_classes,
                     variant);
}

}  // namespace fairprune
