# Bow-tie risk engine package
