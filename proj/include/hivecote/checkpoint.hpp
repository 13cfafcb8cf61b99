#pragma once

#include <hivecote/classifier.hpp>

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hivecote {

  class checkpoint_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  inline constexpr std::uint32_t checkpoint_version = 1;

  struct CheckpointSection {
    std::string name;
    std::string payload;
  };

  /// Container layout: magic "HCCKPT", u32 version, u32 section count, then per section
  /// a length-prefixed name, a length-prefixed payload and an FNV-1a checksum of the payload.
  /// All integers little-endian.
  std::string encode_checkpoint(const std::vector<CheckpointSection>& sections);
  std::vector<CheckpointSection> decode_checkpoint(const std::string& bytes);

  void write_checkpoint(const std::filesystem::path& path, const std::vector<CheckpointSection>& sections);
  std::vector<CheckpointSection> read_checkpoint(const std::filesystem::path& path);

  /// One-section checkpoint named after the classifier.
  void save_checkpoint(const Classifier& classifier, const std::filesystem::path& path);

  /// Recreates the classifier named in the checkpoint and restores its state.
  std::unique_ptr<Classifier> load_checkpoint(const std::filesystem::path& path);

} // namespace hivecote
