	int device_num = acc_get_device_num(acc_get_device_type());
	#pragma acc init if(device_num == device_num)
