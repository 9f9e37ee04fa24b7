#pragma once

#include <stdexcept>
#include <string>

namespace remctl {

// Every failure raised by the library derives from Error, so callers that do
// not care about the specific kind can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// entropy
class ExhaustedSource : public Error {
 public:
  using Error::Error;
};

// keystore
class KeyReused : public Error {
 public:
  using Error::Error;
};
class OutOfRange : public Error {
 public:
  using Error::Error;
};
class BadMagic : public Error {
 public:
  using Error::Error;
};
class BadVersion : public Error {
 public:
  using Error::Error;
};
class TruncatedFile : public Error {
 public:
  using Error::Error;
};
class ChecksumMismatch : public Error {
 public:
  using Error::Error;
};
class InvalidBlockSize : public Error {
 public:
  using Error::Error;
};
// Checksum-valid SKS image whose contents break a store invariant.
class MalformedStore : public Error {
 public:
  using Error::Error;
};

// frame
class KeyLengthMismatch : public Error {
 public:
  using Error::Error;
};
class BadLength : public Error {
 public:
  using Error::Error;
};
class RegistryError : public Error {
 public:
  using Error::Error;
};

// protocol
class KeyExhausted : public Error {
 public:
  using Error::Error;
};

// randtest
class TooShort : public Error {
 public:
  using Error::Error;
};
class LagOutOfRange : public Error {
 public:
  using Error::Error;
};

}  // namespace remctl
