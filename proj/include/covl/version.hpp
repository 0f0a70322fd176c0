#ifndef COVL_VERSION_HPP
#define COVL_VERSION_HPP

#define COVL_VERSION "0.1.0"

#endif  // COVL_VERSION_HPP
