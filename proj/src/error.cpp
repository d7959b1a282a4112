#include "smot/error.hpp"

namespace smot {

namespace {

std::string stage_message(const std::string& stage, const std::string& what, int frame,
                          const std::vector<int>& ids) {
  std::string msg = stage + " stage failed";
  if (frame >= 0) msg += " at frame " + std::to_string(frame);
  if (!ids.empty()) {
    msg += " (identities";
    for (int id : ids) msg += " " + std::to_string(id);
    msg += ")";
  }
  return msg + ": " + what;
}

}  // namespace

StageError::StageError(std::string stage, const std::string& what, int frame,
                       std::vector<int> identities)
    : Error(stage_message(stage, what, frame, identities)),
      stage_(std::move(stage)),
      frame_(frame),
      identities_(std::move(identities)) {}

}  // namespace smot
