# Services module 