#pragma once

#include <gtest/gtest.h>

#include <functional>

#include "nathedge/error.hpp"

/// Error code raised by f, or a test failure when it returns normally.
inline nathedge::Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const nathedge::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected a nathedge::Error";
    return nathedge::Errc::DataError;
}
