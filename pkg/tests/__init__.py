"""Certificate generation microservice tests."""
