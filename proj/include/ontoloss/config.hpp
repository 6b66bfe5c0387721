#pragma once

#include <string>

#include "ontoloss/trainer.hpp"

namespace ontoloss {

// Flat key-value config file: one `key = value` per line, `#` comments and
// blank lines skipped. Unknown keys and malformed values are DomainErrors
// (reported with the line number). Keys, all optional:
//   tnorm          product | lukasiewicz
//   variant        standard | balanced | xu
//   k              > 1 when variant = balanced
//   epsilon        > 0 when variant = balanced
//   w_impl, w_disj >= 0
//   beta           in [0, 1)
//   max_epochs, batch_size   positive integers
//   learning_rate  > 0
//   hidden_dims    comma-separated positive integers, e.g. 64 or 128,64
//   semi_supervised  true|false|1|0
//   split_train, split_val, split_test   nonnegative ratio weights
TrainConfig parse_train_config(const std::string& path);

// defaults as documented above
TrainConfig default_train_config();

}  // namespace ontoloss
