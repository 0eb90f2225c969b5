namespace crownwave {}
