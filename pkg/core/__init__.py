# Core application
