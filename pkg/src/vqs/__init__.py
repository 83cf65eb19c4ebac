"""Neural-network variational ground states for 1-D quantum wells."""
