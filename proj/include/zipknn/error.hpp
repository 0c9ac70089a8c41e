#pragma once

#include <stdexcept>
#include <string>

namespace zipknn {

enum class Errc {
  EmptyTrainSet,
  EmptyQuerySet,
  UnsupportedChannelCount,
  InvalidSide,
  MissingClassDir,
  UndecodableImage,
  InsufficientImages,
  InvalidK,
  LengthMismatch,
  DegenerateSplit,
  MalformedCsv,
  InvalidConfig,
  IoError,
};

constexpr const char* errc_name(Errc code) {
  switch (code) {
    case Errc::EmptyTrainSet: return "EmptyTrainSet";
    case Errc::EmptyQuerySet: return "EmptyQuerySet";
    case Errc::UnsupportedChannelCount: return "UnsupportedChannelCount";
    case Errc::InvalidSide: return "InvalidSide";
    case Errc::MissingClassDir: return "MissingClassDir";
    case Errc::UndecodableImage: return "UndecodableImage";
    case Errc::InsufficientImages: return "InsufficientImages";
    case Errc::InvalidK: return "InvalidK";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegenerateSplit: return "DegenerateSplit";
    case Errc::MalformedCsv: return "MalformedCsv";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace zipknn
