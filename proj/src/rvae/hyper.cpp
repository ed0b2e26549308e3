// SPDX-License-Identifier: Apache-2.0
#include "mint/rvae/hyper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mint::rvae {

RvaeHyper RvaeHyper::scaled(double factor) const {
  if (!(factor > 0)) throw std::invalid_argument("scale factor must be > 0");
  RvaeHyper h = *this;
  h.epochs = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(epochs * factor)));
  h.warmup_epochs = warmup_epochs * factor;
  return h;
}

void RvaeHyper::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("RvaeHyper: ") + what);
  };
  require(lambda_pose >= 0 && lambda_emotion >= 0 && lambda_label >= 0 && beta_max >= 0,
          "loss weights must be >= 0");
  require(free_bits >= 0 && confidence_floor >= 0, "floors must be >= 0");
  require(huber_delta > 0, "huber_delta must be > 0");
  require(pose_coord_weight >= 0 && pose_conf_weight >= 0 &&
              std::abs(pose_coord_weight + pose_conf_weight - 1.0) < 1e-12,
          "pose_coord_weight + pose_conf_weight must equal 1");
  require(latent_dim >= 1, "latent_dim must be >= 1");
  require(mlp_dims[0] > 0 && mlp_dims[1] > 0 && mlp_dims[2] > 0, "mlp dims must be > 0");
  require(encoder_hidden > 0 && decoder_hidden > 0 && decoder_input_dim > 0 && output_hidden > 0,
          "layer widths must be > 0");
  require(dropout >= 0 && dropout < 1, "dropout must lie in [0, 1)");
  require(batch_size > 0 && epochs > 0, "batch_size and epochs must be > 0");
  require(warmup_epochs > 0, "warmup_epochs must be > 0");
  require(learning_rate > 0 && weight_decay >= 0, "invalid optimizer settings");
}

void to_json(nlohmann::json& j, const RvaeHyper& h) {
  j = {{"lambda_pose", h.lambda_pose},
       {"lambda_emotion", h.lambda_emotion},
       {"lambda_label", h.lambda_label},
       {"beta_max", h.beta_max},
       {"warmup_epochs", h.warmup_epochs},
       {"free_bits", h.free_bits},
       {"confidence_floor", h.confidence_floor},
       {"huber_delta", h.huber_delta},
       {"pose_coord_weight", h.pose_coord_weight},
       {"pose_conf_weight", h.pose_conf_weight},
       {"latent_dim", h.latent_dim},
       {"mlp_dims", h.mlp_dims},
       {"encoder_hidden", h.encoder_hidden},
       {"decoder_hidden", h.decoder_hidden},
       {"decoder_input_dim", h.decoder_input_dim},
       {"output_hidden", h.output_hidden},
       {"dropout", h.dropout},
       {"batch_size", h.batch_size},
       {"epochs", h.epochs},
       {"learning_rate", h.learning_rate},
       {"weight_decay", h.weight_decay}};
}

void from_json(const nlohmann::json& j, RvaeHyper& h) {
  j.at("lambda_pose").get_to(h.lambda_pose);
  j.at("lambda_emotion").get_to(h.lambda_emotion);
  j.at("lambda_label").get_to(h.lambda_label);
  j.at("beta_max").get_to(h.beta_max);
  j.at("warmup_epochs").get_to(h.warmup_epochs);
  j.at("free_bits").get_to(h.free_bits);
  j.at("confidence_floor").get_to(h.confidence_floor);
  j.at("huber_delta").get_to(h.huber_delta);
  j.at("pose_coord_weight").get_to(h.pose_coord_weight);
  j.at("pose_conf_weight").get_to(h.pose_conf_weight);
  j.at("latent_dim").get_to(h.latent_dim);
  j.at("mlp_dims").get_to(h.mlp_dims);
  j.at("encoder_hidden").get_to(h.encoder_hidden);
  j.at("decoder_hidden").get_to(h.decoder_hidden);
  j.at("decoder_input_dim").get_to(h.decoder_input_dim);
  j.at("output_hidden").get_to(h.output_hidden);
  j.at("dropout").get_to(h.dropout);
  j.at("batch_size").get_to(h.batch_size);
  j.at("epochs").get_to(h.epochs);
  j.at("learning_rate").get_to(h.learning_rate);
  j.at("weight_decay").get_to(h.weight_decay);
}

}  // namespace mint::rvae
