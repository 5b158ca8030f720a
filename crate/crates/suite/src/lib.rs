//! Holds the `acceptance` test target, which prints one PASS/FAIL line per
//! criterion. It lives in its own package so that it runs after the other
//! test targets of the workspace.
